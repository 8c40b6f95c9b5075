//! Structural invariants of the pipeline stages, as reusable checks.

#![allow(dead_code)]

use std::collections::BTreeSet;

use newsseg_core::articles::{build_section_tree, order_sections};
use newsseg_core::grid::{
    assign_content, extract_grid_boxes, generate_grid, prolong_horizontals_and_titles, prolong_verticals,
    Separator, SeparatorGrid, TitleBlock,
};
use newsseg_core::textlines::{compute_line_stats, split_merged_lines, SplitParams, TextLine};
use newsseg_core::{Orientation, PixelSet, Rect, Span};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Raw grid parts: verticals `(x, y0, len)`, horizontals `(y, x0, len)`,
/// titles `(x0, y0, w, h)`.
#[derive(Debug, Clone)]
pub struct GridParts {
    pub width: i32,
    pub height: i32,
    pub verticals: Vec<(i32, i32, i32)>,
    pub horizontals: Vec<(i32, i32, i32)>,
    pub titles: Vec<(i32, i32, i32, i32)>,
}

impl GridParts {
    pub fn random(rng: &mut ChaCha8Rng) -> Self {
        let width = rng.random_range(100..400);
        let height = rng.random_range(100..400);
        let verticals = (0..rng.random_range(0..8))
            .map(|_| (rng.random_range(0..width), rng.random_range(0..height), rng.random_range(1..height)))
            .collect();
        let horizontals = (0..rng.random_range(0..8))
            .map(|_| (rng.random_range(0..height), rng.random_range(0..width), rng.random_range(1..width)))
            .collect();
        let titles = (0..rng.random_range(0..3))
            .map(|_| (rng.random_range(0..width - 20), rng.random_range(0..height - 10), rng.random_range(5..60), rng.random_range(3..20)))
            .collect();
        GridParts { width, height, verticals, horizontals, titles }
    }

    pub fn page(&self) -> Rect {
        Rect::new(0, 0, self.width, self.height)
    }

    pub fn separators(&self) -> (Vec<Separator>, Vec<Separator>, Vec<TitleBlock>) {
        let (w, h) = (self.width, self.height);
        let v = self
            .verticals
            .iter()
            .enumerate()
            .map(|(i, &(x, y0, len))| Separator::new(i, Orientation::Vertical, Span::new(y0, (y0 + len).min(h)), x.min(w - 1), 3))
            .collect();
        let hs = self
            .horizontals
            .iter()
            .enumerate()
            .map(|(i, &(y, x0, len))| Separator::new(i, Orientation::Horizontal, Span::new(x0, (x0 + len).min(w)), y.min(h - 1), 3))
            .collect();
        let t = self
            .titles
            .iter()
            .enumerate()
            .map(|(i, &(x0, y0, tw, th))| {
                let r = Rect::new(x0, y0, (x0 + tw).min(w), (y0 + th).min(h));
                TitleBlock::new(i, PixelSet::from_rect(r))
            })
            .collect();
        (v, hs, t)
    }

    pub fn raw_grid(&self) -> SeparatorGrid {
        let (verticals, horizontals, titles) = self.separators();
        SeparatorGrid { verticals, horizontals, titles, page: self.page() }
    }

    pub fn generated(&self) -> SeparatorGrid {
        let (v, h, t) = self.separators();
        generate_grid(v, h, t, self.page(), 6.0, 1.5)
    }
}

/// Grid boxes are disjoint, lie in the page and cover it.
pub fn check_partition(grid: &SeparatorGrid) -> Result<(), String> {
    let boxes = extract_grid_boxes(grid);
    for (i, a) in boxes.iter().enumerate() {
        if a.bbox.is_empty() || !grid.page.contains(&a.bbox) {
            return Err(format!("box {} {} outside page or empty", a.id, a.bbox));
        }
        for b in &boxes[i + 1..] {
            if a.bbox.overlap_area(&b.bbox) > 0 {
                return Err(format!("boxes {} and {} overlap", a.bbox, b.bbox));
            }
        }
    }
    let area: i64 = boxes.iter().map(|b| b.bbox.area()).sum();
    if area != grid.page.area() {
        return Err(format!("boxes cover {area} of {}", grid.page.area()));
    }
    Ok(())
}

fn grown(before: &[Separator], after: &[Separator]) -> Result<(), String> {
    for (a, b) in before.iter().zip(after) {
        if !b.span.contains_span(&a.span) || a.position != b.position {
            return Err(format!("separator {} shrank or moved: {:?} -> {:?}", a.id, a.span, b.span));
        }
    }
    Ok(())
}

/// Prolongation only lengthens separators and is idempotent.
pub fn check_prolongation(grid: &SeparatorGrid) -> Result<(), String> {
    let v1 = prolong_verticals(grid);
    grown(&grid.verticals, &v1.verticals)?;
    if prolong_verticals(&v1) != v1 {
        return Err("vertical prolongation is not a fixpoint".into());
    }
    let h1 = prolong_horizontals_and_titles(&v1);
    grown(&v1.horizontals, &h1.horizontals)?;
    for (a, b) in v1.titles.iter().zip(&h1.titles) {
        if !b.segment.contains_span(&a.segment) {
            return Err(format!("title {} segment shrank", a.id));
        }
    }
    if prolong_horizontals_and_titles(&h1) != h1 {
        return Err("horizontal prolongation is not a fixpoint".into());
    }
    Ok(())
}

/// A text line filling one box of the grid, for driving assignment.
fn box_lines(grid: &SeparatorGrid) -> Vec<TextLine> {
    extract_grid_boxes(grid)
        .iter()
        .filter(|b| b.bbox.width() > 4 && b.bbox.height() > 4)
        .enumerate()
        .map(|(i, b)| {
            let r = Rect::new(b.bbox.x0 + 1, b.bbox.y0 + 1, b.bbox.x1 - 1, b.bbox.y0 + 3);
            TextLine::from_pixels(i, PixelSet::from_rect(r))
        })
        .collect()
}

/// Reading order lists every content box exactly once.
pub fn check_order_permutation(grid: &SeparatorGrid) -> Result<(), String> {
    let lines = box_lines(grid);
    let boxes = assign_content(&extract_grid_boxes(grid), &lines, &grid.titles);
    let tree = build_section_tree(&boxes, grid);
    let order = order_sections(&tree);
    let mut sorted = order.clone();
    sorted.sort_unstable();
    let want: Vec<usize> = {
        let mut ids: Vec<usize> = boxes.iter().map(|b| b.id).collect();
        ids.sort_unstable();
        ids
    };
    if sorted != want {
        return Err(format!("order {order:?} is not a permutation of {want:?}"));
    }
    Ok(())
}

/// A line blob `(x0, y0, w, h)`.
pub type Blob = (i32, i32, i32, i32);

/// Blobs; consecutive pairs flagged in `fused` are joined
/// by a one-pixel bridge into a single line.
pub fn make_lines(blobs: &[Blob], fused: &[bool]) -> Vec<TextLine> {
    let mut sets: Vec<PixelSet> = Vec::new();
    let mut i = 0;
    while i < blobs.len() {
        let (x, y, w, h) = blobs[i];
        let mut set = PixelSet::from_rect(Rect::new(x, y, x + w, y + h));
        if fused.get(i).copied().unwrap_or(false) && i + 1 < blobs.len() {
            let (x2, _, w2, h2) = blobs[i + 1];
            let y2 = y + h + 2;
            let next = Rect::new(x2.min(x), y2, x2.min(x) + w2, y2 + h2);
            let bridge = Rect::new(x + w / 2, y + h, x + w / 2 + 1, y2);
            set = set.union(&PixelSet::from_rect(next)).union(&PixelSet::from_rect(bridge));
            i += 1;
        }
        sets.push(set);
        i += 1;
    }
    sets.into_iter().enumerate().map(|(id, p)| TextLine::from_pixels(id, p)).collect()
}

fn pixels_of(lines: &[TextLine]) -> Vec<(u32, u32)> {
    let mut v: Vec<(u32, u32)> = lines.iter().flat_map(|l| l.pixels.iter().collect::<Vec<_>>()).collect();
    v.sort_unstable();
    v
}

/// Splitting partitions the pixels of the input lines, and assignment
/// places every line in exactly one box.
pub fn check_line_conservation(lines: Vec<TextLine>, grid: &SeparatorGrid) -> Result<(), String> {
    let before = pixels_of(&lines);
    let stats = compute_line_stats(&lines);
    let params = SplitParams { factor: 1.2, ..SplitParams::default() };
    let split = split_merged_lines(lines, &stats, &params);
    let after = pixels_of(&split);
    if before != after {
        return Err(format!("split changed the pixel multiset: {} -> {} pixels", before.len(), after.len()));
    }
    let ids: BTreeSet<usize> = split.iter().map(|l| l.id).collect();
    if ids.len() != split.len() {
        return Err("split produced duplicate line ids".into());
    }
    let boxes = assign_content(&extract_grid_boxes(grid), &split, &grid.titles);
    let mut assigned: Vec<usize> = boxes.iter().flat_map(|b| b.text_lines.iter().copied()).collect();
    assigned.sort_unstable();
    let want: Vec<usize> = ids.into_iter().collect();
    if assigned != want {
        return Err(format!("assigned {assigned:?}, expected {want:?}"));
    }
    Ok(())
}

pub fn random_blobs(rng: &mut ChaCha8Rng) -> (Vec<Blob>, Vec<bool>) {
    let n = rng.random_range(1..12);
    let blobs = (0..n)
        .map(|i| (rng.random_range(0..200), 10 + 40 * i, rng.random_range(20..150), rng.random_range(4..12)))
        .collect();
    let fused = (0..n).map(|_| rng.random_bool(0.3)).collect();
    (blobs, fused)
}

/// Runs every invariant over `cases` seeded random instances.
pub fn check_all(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let parts = GridParts::random(&mut rng);
        let wrap = |r: Result<(), String>| r.map_err(|e| format!("case {case}: {e} ({parts:?})"));
        wrap(check_partition(&parts.raw_grid()))?;
        wrap(check_partition(&parts.generated()))?;
        wrap(check_prolongation(&parts.raw_grid()))?;
        wrap(check_order_permutation(&parts.generated()))?;
        let (blobs, fused) = random_blobs(&mut rng);
        let page = SeparatorGrid { page: Rect::new(0, 0, 400, 600), ..parts.raw_grid() };
        wrap(check_line_conservation(make_lines(&blobs, &fused), &page))?;
    }
    Ok(())
}
