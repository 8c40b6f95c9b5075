//! Text-line extraction and repair of lines fused by print degradation.
//!
//! Lines are the connected text components of the entity image. A line whose
//! convex hull is much larger than the issue-wide mean hull area is assumed
//! to be several lines joined by thin bridges; it is cut at the valleys of
//! its row projection profile.

use serde::{Deserialize, Serialize};

use crate::geometry::Rect;
use crate::labels::InformativeLabel;
use crate::pixels::PixelSet;
use crate::smoothing::{Connectivity, EntityImage};

#[derive(Debug, Clone, PartialEq)]
pub struct TextLine {
    pub id: usize,
    pub pixels: PixelSet,
    pub bbox: Rect,
    /// Area of the convex hull of the pixel squares.
    pub hull_area: f64,
    pub baseline_y: i32,
    /// Still above the split threshold after the allowed split rounds.
    pub oversized: bool,
    /// Thin bridge pixels cut out of a fused line.
    pub residue: bool,
}

impl TextLine {
    pub fn from_pixels(id: usize, pixels: PixelSet) -> Self {
        let bbox = pixels.bbox();
        let hull_area = hull_area(&pixels);
        let baseline_y = estimate_baseline(&pixels);
        TextLine { id, pixels, bbox, hull_area, baseline_y, oversized: false, residue: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineStats {
    pub mean_hull_area: f64,
    pub count: usize,
}

/// Parameters of the fused-line repair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitParams {
    /// Lines with hull area above `factor × mean` are split.
    pub factor: f64,
    /// A row is a valley when its pixel count is below this fraction of the
    /// line's median row count.
    pub valley_ratio: f64,
    pub max_rounds: u32,
}

impl Default for SplitParams {
    fn default() -> Self {
        SplitParams { factor: 2.5, valley_ratio: 0.2, max_rounds: 3 }
    }
}

/// One line per connected text component, in raster order.
pub fn extract_text_lines(entity: &EntityImage, connectivity: Connectivity) -> Vec<TextLine> {
    entity
        .entities(connectivity)
        .into_iter()
        .filter(|e| e.label == InformativeLabel::TextLine)
        .enumerate()
        .map(|(id, e)| TextLine::from_pixels(id, e.pixels))
        .collect()
}

/// Mean hull area over all lines of an issue.
pub fn compute_line_stats<'a>(lines: impl IntoIterator<Item = &'a TextLine>) -> LineStats {
    let mut sum = 0.0;
    let mut count = 0usize;
    for l in lines {
        sum += l.hull_area;
        count += 1;
    }
    LineStats { mean_hull_area: if count == 0 { 0.0 } else { sum / count as f64 }, count }
}

/// Splits oversized lines. Unchanged lines keep their ids; new pieces get
/// fresh ids above the largest input id.
pub fn split_merged_lines(lines: Vec<TextLine>, stats: &LineStats, params: &SplitParams) -> Vec<TextLine> {
    if stats.count == 0 || stats.mean_hull_area <= 0.0 {
        return lines;
    }
    let limit = params.factor * stats.mean_hull_area;
    let mut next_id = lines.iter().map(|l| l.id + 1).max().unwrap_or(0);
    let mut out = Vec::with_capacity(lines.len());
    for line in lines {
        if line.hull_area <= limit {
            out.push(line);
            continue;
        }
        let mut pending = vec![line];
        for _ in 0..params.max_rounds {
            let mut next = Vec::new();
            let mut changed = false;
            for l in pending {
                if l.residue || l.hull_area <= limit {
                    next.push(l);
                    continue;
                }
                match cut_at_valleys(&l.pixels, params.valley_ratio) {
                    Some(pieces) => {
                        changed = true;
                        next.extend(pieces.into_iter().map(|(pixels, residue)| {
                            let mut t = TextLine::from_pixels(0, pixels);
                            t.residue = residue;
                            t
                        }));
                    }
                    None => next.push(l),
                }
            }
            pending = next;
            if !changed {
                break;
            }
        }
        pending.sort_by_key(|l| (l.bbox.y0, l.bbox.x0));
        let was_split = pending.len() > 1;
        for mut l in pending {
            if was_split {
                l.id = next_id;
                next_id += 1;
            }
            l.oversized = !l.residue && l.hull_area > limit;
            out.push(l);
        }
    }
    out
}

/// Cuts a pixel set at interior valleys of its row profile. Returns the
/// pieces top to bottom, flagging the valley pixels as residue pieces.
fn cut_at_valleys(pixels: &PixelSet, valley_ratio: f64) -> Option<Vec<(PixelSet, bool)>> {
    let profile = pixels.row_profile();
    let mut nonzero: Vec<u64> = profile.iter().copied().filter(|&c| c > 0).collect();
    if nonzero.is_empty() {
        return None;
    }
    nonzero.sort_unstable();
    let median = nonzero[nonzero.len() / 2] as f64;
    let threshold = valley_ratio * median;
    let low: Vec<bool> = profile.iter().map(|&c| (c as f64) < threshold).collect();

    // maximal low runs strictly inside the profile
    let mut valleys: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < low.len() {
        if low[i] {
            let s = i;
            while i < low.len() && low[i] {
                i += 1;
            }
            if s > 0 && i < low.len() {
                valleys.push((s, i));
            }
        } else {
            i += 1;
        }
    }
    if valleys.is_empty() {
        return None;
    }
    let y0 = pixels.bbox().y0 as u32;
    let mut pieces = Vec::new();
    let mut cursor = 0usize;
    for &(s, e) in &valleys {
        pieces.push((pixels.select_rows(y0 + cursor as u32..y0 + s as u32), false));
        let bridge = pixels.select_rows(y0 + s as u32..y0 + e as u32);
        if !bridge.is_empty() {
            pieces.push((bridge, true));
        }
        cursor = e;
    }
    pieces.push((pixels.select_rows(y0 + cursor as u32..y0 + profile.len() as u32), false));
    pieces.retain(|(p, _)| !p.is_empty());
    Some(pieces)
}

/// Area of the convex hull of the unit squares of all pixels.
pub fn hull_area(pixels: &PixelSet) -> f64 {
    let mut points: Vec<(i64, i64)> = Vec::new();
    let runs = pixels.runs();
    let mut i = 0;
    while i < runs.len() {
        let y = runs[i].y;
        let mut lo = runs[i].x0;
        let mut hi = runs[i].x1;
        while i < runs.len() && runs[i].y == y {
            lo = lo.min(runs[i].x0);
            hi = hi.max(runs[i].x1);
            i += 1;
        }
        let (y, lo, hi) = (y as i64, lo as i64, hi as i64);
        points.extend_from_slice(&[(lo, y), (lo, y + 1), (hi, y), (hi, y + 1)]);
    }
    let hull = convex_hull(points);
    polygon_area_x2(&hull) as f64 / 2.0
}

/// Andrew's monotone chain; returns the hull counter-clockwise without
/// collinear points.
pub(crate) fn convex_hull(mut points: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    points.sort_unstable();
    points.dedup();
    if points.len() < 3 {
        return points;
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &points {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in points.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub(crate) fn polygon_area_x2(poly: &[(i64, i64)]) -> i64 {
    if poly.len() < 3 {
        return 0;
    }
    let mut s = 0i64;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        s += a.0 * b.1 - b.0 * a.1;
    }
    s.abs()
}

/// Lowest row whose pixel count reaches half the median row count.
fn estimate_baseline(pixels: &PixelSet) -> i32 {
    let bbox = pixels.bbox();
    let profile = pixels.row_profile();
    let mut sorted: Vec<u64> = profile.iter().copied().filter(|&c| c > 0).collect();
    if sorted.is_empty() {
        return bbox.y1 - 1;
    }
    sorted.sort_unstable();
    let half = sorted[sorted.len() / 2] as f64 / 2.0;
    profile
        .iter()
        .rposition(|&c| c as f64 >= half)
        .map_or(bbox.y1 - 1, |i| bbox.y0 + i as i32)
}
