//! Separator grid construction.
//!
//! Detected rulings are fitted to axis-aligned segments, broken pieces are
//! reconnected, verticals are prolonged until they meet a horizontal rule or
//! a title, then horizontals and title top edges are prolonged until they
//! meet a vertical. The resulting arrangement tiles the page into boxes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geometry::{Orientation, Rect, Span};
use crate::labels::InformativeLabel;
use crate::pixels::PixelSet;
use crate::smoothing::{Connectivity, EntityImage, UnionFind};
use crate::textlines::TextLine;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparatorOrigin {
    Detected,
    Connected,
    Prolonged,
}

/// An idealized ruling: `span` runs along its orientation, `position` is the
/// cross-axis coordinate of its centre line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separator {
    pub id: usize,
    pub orientation: Orientation,
    pub span: Span,
    pub position: i32,
    pub thickness: i32,
    pub origin: SeparatorOrigin,
    /// Span as detected (after reconnection), before prolongation.
    pub detected: Span,
}

impl Separator {
    pub fn new(id: usize, orientation: Orientation, span: Span, position: i32, thickness: i32) -> Self {
        Separator {
            id,
            orientation,
            span,
            position,
            thickness,
            origin: SeparatorOrigin::Detected,
            detected: span,
        }
    }

    pub fn length(&self) -> i32 {
        self.span.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TitleBlock {
    pub id: usize,
    pub bbox: Rect,
    pub pixels: PixelSet,
    /// Horizontal extent of the gridding segment along the title's top edge.
    pub segment: Span,
}

impl TitleBlock {
    pub fn new(id: usize, pixels: PixelSet) -> Self {
        let bbox = pixels.bbox();
        TitleBlock { id, bbox, pixels, segment: Span::new(bbox.x0, bbox.x1) }
    }

    pub fn segment_y(&self) -> i32 {
        self.bbox.y0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatorGrid {
    pub verticals: Vec<Separator>,
    pub horizontals: Vec<Separator>,
    pub titles: Vec<TitleBlock>,
    pub page: Rect,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MaskIssue {
    /// A separator component thicker than allowed; it was demoted to noise.
    ComponentTooThick { id: usize, orientation: Orientation, thickness: i32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatorMask {
    pub verticals: Vec<Separator>,
    pub horizontals: Vec<Separator>,
    pub titles: Vec<TitleBlock>,
    pub issues: Vec<MaskIssue>,
}

/// Fits separator components to segments and collects title blocks.
pub fn build_separator_mask(
    entity: &EntityImage,
    connectivity: Connectivity,
    max_thickness: i32,
) -> SeparatorMask {
    let mut mask = SeparatorMask {
        verticals: Vec::new(),
        horizontals: Vec::new(),
        titles: Vec::new(),
        issues: Vec::new(),
    };
    for (id, ent) in entity.entities(connectivity).into_iter().enumerate() {
        let b = ent.bbox;
        let orientation = match ent.label {
            InformativeLabel::VerticalSeparator => Orientation::Vertical,
            InformativeLabel::HorizontalSeparator => Orientation::Horizontal,
            InformativeLabel::Title => {
                let tid = mask.titles.len();
                mask.titles.push(TitleBlock::new(tid, ent.pixels));
                continue;
            }
            _ => continue,
        };
        let (span, cross) = match orientation {
            Orientation::Vertical => (Span::new(b.y0, b.y1), Span::new(b.x0, b.x1)),
            Orientation::Horizontal => (Span::new(b.x0, b.x1), Span::new(b.y0, b.y1)),
        };
        let thickness = cross.len();
        if thickness > max_thickness {
            mask.issues.push(MaskIssue::ComponentTooThick { id, orientation, thickness });
            continue;
        }
        let position = (cross.start + cross.end - 1).div_euclid(2);
        let list = match orientation {
            Orientation::Vertical => &mut mask.verticals,
            Orientation::Horizontal => &mut mask.horizontals,
        };
        list.push(Separator::new(list.len(), orientation, span, position, thickness));
    }
    mask
}

/// Merges collinear pieces closer than the tolerances, to a fixpoint.
pub fn connect_collinear(seps: &[Separator], gap_tol: f64, offset_tol: f64) -> Vec<Separator> {
    connect_collinear_with(seps, gap_tol, offset_tol, |_, _| false)
}

/// As [`connect_collinear`], but never joins a pair for which `blocked`
/// holds (a crossing ruling or title lies in the gap).
pub fn connect_collinear_with(
    seps: &[Separator],
    gap_tol: f64,
    offset_tol: f64,
    blocked: impl Fn(&Separator, &Separator) -> bool,
) -> Vec<Separator> {
    let mut current: Vec<Separator> = seps.to_vec();
    loop {
        let n = current.len();
        let mut uf = UnionFind::new(n);
        let mut merged_any = false;
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (&current[i], &current[j]);
                if close(a, b, gap_tol, offset_tol) && !blocked(a, b) && uf.find(i) != uf.find(j) {
                    uf.union(i, j);
                    merged_any = true;
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            groups.entry(uf.find(i)).or_default().push(i);
        }
        let mut next: Vec<Separator> = groups
            .values()
            .map(|members| merge_group(members.iter().map(|&i| &current[i])))
            .collect();
        next.sort_by_key(|s| (s.position, s.span.start, s.span.end));
        for (id, s) in next.iter_mut().enumerate() {
            s.id = id;
        }
        current = next;
        if !merged_any {
            return current;
        }
    }
}

pub(crate) fn close(a: &Separator, b: &Separator, gap_tol: f64, offset_tol: f64) -> bool {
    a.orientation == b.orientation
        && ((a.position - b.position).abs() as f64) <= offset_tol
        && (a.span.gap(&b.span) as f64) <= gap_tol
}

fn merge_group<'a>(members: impl Iterator<Item = &'a Separator>) -> Separator {
    let members: Vec<&Separator> = members.collect();
    if members.len() == 1 {
        return members[0].clone();
    }
    let first = members[0];
    let span = members.iter().fold(first.span, |acc, s| acc.hull(&s.span));
    let detected = members.iter().fold(first.detected, |acc, s| acc.hull(&s.detected));
    let weight: i64 = members.iter().map(|s| s.span.len().max(1) as i64).sum();
    let weighted: i64 = members.iter().map(|s| s.position as i64 * s.span.len().max(1) as i64).sum();
    // round half up
    let position = (2 * weighted + weight).div_euclid(2 * weight) as i32;
    Separator {
        id: first.id,
        orientation: first.orientation,
        span,
        position,
        thickness: members.iter().map(|s| s.thickness).max().unwrap_or(1),
        origin: SeparatorOrigin::Connected,
        detected,
    }
}

/// Extends verticals until they touch a horizontal ruling, a title or the
/// page edge.
pub fn prolong_verticals(grid: &SeparatorGrid) -> SeparatorGrid {
    let mut out = grid.clone();
    for v in &mut out.verticals {
        let x = v.position;
        let mut top = grid.page.y0;
        let mut bottom = grid.page.y1;
        for h in &grid.horizontals {
            if !h.span.touches(x) {
                continue;
            }
            if h.position <= v.span.start {
                top = top.max(h.position);
            }
            if h.position >= v.span.end {
                bottom = bottom.min(h.position);
            }
        }
        for t in &grid.titles {
            if x < t.bbox.x0 || x >= t.bbox.x1 {
                continue;
            }
            if t.bbox.y1 <= v.span.start {
                top = top.max(t.bbox.y1);
            }
            if t.bbox.y0 >= v.span.end {
                bottom = bottom.min(t.bbox.y0);
            }
        }
        let span = Span::new(top.min(v.span.start), bottom.max(v.span.end));
        if span != v.span {
            v.span = span;
            v.origin = SeparatorOrigin::Prolonged;
        }
    }
    out
}

/// Extends horizontals and title top edges until they touch a vertical
/// ruling or the page edge.
pub fn prolong_horizontals_and_titles(grid: &SeparatorGrid) -> SeparatorGrid {
    let mut out = grid.clone();
    let extend = |y: i32, span: Span| -> Span {
        let mut left = grid.page.x0;
        let mut right = grid.page.x1;
        for v in &grid.verticals {
            if !v.span.strictly_contains(y) {
                continue;
            }
            if v.position <= span.start {
                left = left.max(v.position);
            }
            if v.position >= span.end {
                right = right.min(v.position);
            }
        }
        Span::new(left.min(span.start), right.max(span.end))
    };
    for h in &mut out.horizontals {
        let span = extend(h.position, h.span);
        if span != h.span {
            h.span = span;
            h.origin = SeparatorOrigin::Prolonged;
        }
    }
    for t in &mut out.titles {
        t.segment = extend(t.segment_y(), t.segment);
    }
    out
}

/// Runs the five generation steps: connect verticals, prolong them, connect
/// horizontals, prolong horizontals and titles.
pub fn generate_grid(
    verticals: Vec<Separator>,
    horizontals: Vec<Separator>,
    titles: Vec<TitleBlock>,
    page: Rect,
    gap_tol: f64,
    offset_tol: f64,
) -> SeparatorGrid {
    let verticals = connect_collinear_with(&verticals, gap_tol, offset_tol, |a, b| {
        vertical_gap_blocked(a, b, &horizontals, &titles)
    });
    let grid = SeparatorGrid { verticals, horizontals, titles, page };
    let mut grid = prolong_verticals(&grid);
    let verticals = &grid.verticals;
    let horizontals = connect_collinear_with(&grid.horizontals, gap_tol, offset_tol, |a, b| {
        horizontal_gap_blocked(a, b, verticals)
    });
    grid.horizontals = horizontals;
    prolong_horizontals_and_titles(&grid)
}

fn gap_interval(a: &Separator, b: &Separator) -> (i32, i32) {
    let lo = a.span.end.min(b.span.end);
    let hi = a.span.start.max(b.span.start);
    (lo.min(hi), lo.max(hi))
}

fn vertical_gap_blocked(a: &Separator, b: &Separator, horizontals: &[Separator], titles: &[TitleBlock]) -> bool {
    if a.span.gap(&b.span) < 0 {
        return false;
    }
    let (lo, hi) = gap_interval(a, b);
    let xs = [a.position, b.position];
    horizontals.iter().any(|h| {
        h.position >= lo && h.position <= hi && xs.iter().any(|&x| h.span.touches(x))
    }) || titles.iter().any(|t| {
        t.bbox.y0 <= hi && t.bbox.y1 >= lo && xs.iter().any(|&x| x >= t.bbox.x0 && x < t.bbox.x1)
    })
}

fn horizontal_gap_blocked(a: &Separator, b: &Separator, verticals: &[Separator]) -> bool {
    if a.span.gap(&b.span) < 0 {
        return false;
    }
    let (lo, hi) = gap_interval(a, b);
    let ys = [a.position, b.position];
    verticals.iter().any(|v| {
        v.position >= lo && v.position <= hi && ys.iter().any(|&y| v.span.strictly_contains(y))
    })
}

/// What forms the top edge of a grid box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum TopEdge {
    Page,
    Rule(usize),
    Title(usize),
    /// No single element covers the whole top edge.
    Open,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridBox {
    pub id: usize,
    pub bbox: Rect,
    pub text_lines: Vec<usize>,
    pub titles: Vec<usize>,
    pub has_title: bool,
    pub top_edge: TopEdge,
}

/// Cells of the arrangement of all grid segments, clipped to the page.
///
/// The page is cut into elementary cells at every segment coordinate and
/// endpoint; cells not separated by a segment are merged into row runs, and
/// runs with the same horizontal extent are stacked while no segment
/// separates them. Boxes are ordered top to bottom, then left to right.
pub fn extract_grid_boxes(grid: &SeparatorGrid) -> Vec<GridBox> {
    let page = grid.page;
    let clip_x = |v: i32| v.clamp(page.x0, page.x1);
    let clip_y = |v: i32| v.clamp(page.y0, page.y1);

    let mut xs: Vec<i32> = vec![page.x0, page.x1];
    let mut ys: Vec<i32> = vec![page.y0, page.y1];
    for v in &grid.verticals {
        xs.push(clip_x(v.position));
        ys.extend([clip_y(v.span.start), clip_y(v.span.end)]);
    }
    for h in &grid.horizontals {
        ys.push(clip_y(h.position));
        xs.extend([clip_x(h.span.start), clip_x(h.span.end)]);
    }
    for t in &grid.titles {
        ys.push(clip_y(t.segment_y()));
        xs.extend([clip_x(t.segment.start), clip_x(t.segment.end)]);
    }
    xs.sort_unstable();
    xs.dedup();
    ys.sort_unstable();
    ys.dedup();

    let mut vert_at: BTreeMap<i32, Vec<Span>> = BTreeMap::new();
    for v in &grid.verticals {
        vert_at.entry(v.position).or_default().push(v.span);
    }
    let mut horiz_at: BTreeMap<i32, Vec<Span>> = BTreeMap::new();
    for h in &grid.horizontals {
        horiz_at.entry(h.position).or_default().push(h.span);
    }
    for t in &grid.titles {
        horiz_at.entry(t.segment_y()).or_default().push(t.segment);
    }
    let covered = |map: &BTreeMap<i32, Vec<Span>>, at: i32, lo: i32, hi: i32| {
        map.get(&at)
            .is_some_and(|spans| spans.iter().any(|s| s.start <= lo && s.end >= hi))
    };

    let mut closed: Vec<Rect> = Vec::new();
    // open rectangles keyed by (x0, x1)
    let mut open: BTreeMap<(i32, i32), Rect> = BTreeMap::new();
    for wy in ys.windows(2) {
        let (y0, y1) = (wy[0], wy[1]);
        let mut runs: Vec<(i32, i32)> = Vec::new();
        let mut start = xs[0];
        for i in 1..xs.len() {
            let x = xs[i];
            if i == xs.len() - 1 || covered(&vert_at, x, y0, y1) {
                runs.push((start, x));
                start = x;
            }
        }
        let mut next_open: BTreeMap<(i32, i32), Rect> = BTreeMap::new();
        for (x0, x1) in runs {
            let separated = xs
                .windows(2)
                .filter(|w| w[0] >= x0 && w[1] <= x1)
                .any(|w| covered(&horiz_at, y0, w[0], w[1]));
            match open.remove(&(x0, x1)) {
                Some(mut r) if !separated => {
                    r.y1 = y1;
                    next_open.insert((x0, x1), r);
                }
                prev => {
                    if let Some(r) = prev {
                        closed.push(r);
                    }
                    next_open.insert((x0, x1), Rect::new(x0, y0, x1, y1));
                }
            }
        }
        closed.extend(open.into_values());
        open = next_open;
    }
    closed.extend(open.into_values());
    closed.sort_by_key(|r| (r.y0, r.x0));
    closed
        .into_iter()
        .enumerate()
        .map(|(id, bbox)| GridBox {
            id,
            bbox,
            text_lines: Vec::new(),
            titles: Vec::new(),
            has_title: false,
            top_edge: top_edge_of(&bbox, grid),
        })
        .collect()
}

fn top_edge_of(bbox: &Rect, grid: &SeparatorGrid) -> TopEdge {
    let covers = |s: &Span| s.start <= bbox.x0 && s.end >= bbox.x1;
    if let Some(h) = grid
        .horizontals
        .iter()
        .filter(|h| h.position == bbox.y0 && covers(&h.span))
        .max_by_key(|h| (h.span.len(), std::cmp::Reverse(h.id)))
    {
        return TopEdge::Rule(h.id);
    }
    if let Some(t) = grid.titles.iter().find(|t| t.segment_y() == bbox.y0 && covers(&t.segment)) {
        return TopEdge::Title(t.id);
    }
    if bbox.y0 == grid.page.y0 {
        return TopEdge::Page;
    }
    TopEdge::Open
}

/// Assigns lines and titles to boxes and drops boxes without text lines.
///
/// A line goes to the box that fully contains its bounding box, or failing
/// that to the box it overlaps most.
pub fn assign_content(boxes: &[GridBox], lines: &[TextLine], titles: &[TitleBlock]) -> Vec<GridBox> {
    let mut out: Vec<GridBox> = boxes.to_vec();
    for b in &mut out {
        b.text_lines.clear();
        b.titles.clear();
    }
    if out.is_empty() {
        return out;
    }
    for line in lines {
        let idx = best_box(&out, &line.bbox);
        out[idx].text_lines.push(line.id);
    }
    for t in titles {
        let heads = out.iter().position(|b| {
            b.bbox.y0 == t.segment_y()
                && t.segment.start <= b.bbox.x0
                && t.segment.end >= b.bbox.x1
                && b.bbox.contains(&t.bbox)
        });
        let idx = heads.unwrap_or_else(|| best_box(&out, &t.bbox));
        out[idx].titles.push(t.id);
    }
    let line_pos: BTreeMap<usize, (i32, i32)> =
        lines.iter().map(|l| (l.id, (l.bbox.y0, l.bbox.x0))).collect();
    for b in &mut out {
        b.text_lines.sort_by_key(|id| (line_pos[id], *id));
        b.titles.sort_unstable();
        b.has_title = !b.titles.is_empty();
    }
    out.retain(|b| !b.text_lines.is_empty());
    out
}

fn best_box(boxes: &[GridBox], bbox: &Rect) -> usize {
    if let Some(i) = boxes.iter().position(|b| b.bbox.contains(bbox)) {
        return i;
    }
    let mut best = 0;
    let mut best_area = -1i64;
    for (i, b) in boxes.iter().enumerate() {
        let a = b.bbox.overlap_area(bbox);
        if a > best_area {
            best = i;
            best_area = a;
        }
    }
    best
}
