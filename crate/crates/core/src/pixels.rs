//! Run-length pixel sets.
//!
//! Components and text lines store their pixels as horizontal runs, sorted by
//! row then column. Coordinates can always be recovered with [`PixelSet::iter`].

use crate::geometry::Rect;

/// A horizontal run `[x0, x1)` on row `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Run {
    pub y: u32,
    pub x0: u32,
    pub x1: u32,
}

impl Run {
    pub fn len(&self) -> u32 {
        self.x1 - self.x0
    }

    pub fn is_empty(&self) -> bool {
        self.x1 <= self.x0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PixelSet {
    runs: Vec<Run>,
}

impl PixelSet {
    /// Builds a set from runs, sorting them and coalescing touching runs on a row.
    pub fn from_runs(mut runs: Vec<Run>) -> Self {
        runs.retain(|r| !r.is_empty());
        runs.sort_unstable();
        let mut out: Vec<Run> = Vec::with_capacity(runs.len());
        for r in runs {
            match out.last_mut() {
                Some(last) if last.y == r.y && r.x0 <= last.x1 => last.x1 = last.x1.max(r.x1),
                _ => out.push(r),
            }
        }
        PixelSet { runs: out }
    }

    pub fn from_rect(rect: Rect) -> Self {
        let runs = (rect.y0..rect.y1)
            .map(|y| Run { y: y as u32, x0: rect.x0 as u32, x1: rect.x1 as u32 })
            .collect();
        PixelSet::from_runs(runs)
    }

    pub fn from_points(points: impl IntoIterator<Item = (u32, u32)>) -> Self {
        PixelSet::from_runs(points.into_iter().map(|(x, y)| Run { y, x0: x, x1: x + 1 }).collect())
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Number of pixels.
    pub fn len(&self) -> u64 {
        self.runs.iter().map(|r| r.len() as u64).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.runs.iter().flat_map(|r| (r.x0..r.x1).map(move |x| (x, r.y)))
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        let start = self.runs.partition_point(|r| r.y < y);
        self.runs[start..]
            .iter()
            .take_while(|r| r.y == y)
            .any(|r| x >= r.x0 && x < r.x1)
    }

    /// Tight bounding box; empty sets yield an empty rectangle at the origin.
    pub fn bbox(&self) -> Rect {
        if self.runs.is_empty() {
            return Rect::new(0, 0, 0, 0);
        }
        let y0 = self.runs.first().unwrap().y as i32;
        let y1 = self.runs.last().unwrap().y as i32 + 1;
        let x0 = self.runs.iter().map(|r| r.x0).min().unwrap() as i32;
        let x1 = self.runs.iter().map(|r| r.x1).max().unwrap() as i32;
        Rect::new(x0, y0, x1, y1)
    }

    /// Pixel count per row over `[bbox.y0, bbox.y1)`.
    pub fn row_profile(&self) -> Vec<u64> {
        let bbox = self.bbox();
        let mut profile = vec![0u64; bbox.height().max(0) as usize];
        for r in &self.runs {
            profile[(r.y as i32 - bbox.y0) as usize] += r.len() as u64;
        }
        profile
    }

    /// Splits the set by row into pixels with `y` inside `rows` and the rest.
    pub fn select_rows(&self, rows: std::ops::Range<u32>) -> PixelSet {
        PixelSet {
            runs: self.runs.iter().copied().filter(|r| rows.contains(&r.y)).collect(),
        }
    }

    pub fn union(&self, other: &PixelSet) -> PixelSet {
        let mut runs = self.runs.clone();
        runs.extend_from_slice(&other.runs);
        PixelSet::from_runs(runs)
    }
}
