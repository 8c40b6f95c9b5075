//! Integer page geometry.
//!
//! All rectangles are half-open pixel boxes: a rectangle covering the single
//! pixel `(3, 4)` is `Rect { x0: 3, y0: 4, x1: 4, y1: 5 }`.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i32; 4]", into = "[i32; 4]")]
pub struct Rect {
    pub x0: i32,
    pub y0: i32,
    pub x1: i32,
    pub y1: i32,
}

impl Rect {
    pub const fn new(x0: i32, y0: i32, x1: i32, y1: i32) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    /// Rectangle with the given origin and size.
    pub const fn from_size(x: i32, y: i32, width: i32, height: i32) -> Self {
        Rect::new(x, y, x + width, y + height)
    }

    pub fn width(&self) -> i32 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> i32 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> i64 {
        if self.is_empty() {
            0
        } else {
            self.width() as i64 * self.height() as i64
        }
    }

    pub fn is_empty(&self) -> bool {
        self.x1 <= self.x0 || self.y1 <= self.y0
    }

    pub fn contains_point(&self, x: i32, y: i32) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }

    pub fn contains(&self, other: &Rect) -> bool {
        other.x0 >= self.x0 && other.x1 <= self.x1 && other.y0 >= self.y0 && other.y1 <= self.y1
    }

    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        let r = Rect::new(
            self.x0.max(other.x0),
            self.y0.max(other.y0),
            self.x1.min(other.x1),
            self.y1.min(other.y1),
        );
        (!r.is_empty()).then_some(r)
    }

    pub fn overlap_area(&self, other: &Rect) -> i64 {
        self.intersection(other).map_or(0, |r| r.area())
    }

    /// Smallest rectangle containing both.
    pub fn hull(&self, other: &Rect) -> Rect {
        Rect::new(
            self.x0.min(other.x0),
            self.y0.min(other.y0),
            self.x1.max(other.x1),
            self.y1.max(other.y1),
        )
    }

    pub fn center(&self) -> (f64, f64) {
        (
            (self.x0 + self.x1) as f64 / 2.0,
            (self.y0 + self.y1) as f64 / 2.0,
        )
    }

    /// Span along an axis.
    pub fn span(&self, orientation: Orientation) -> Span {
        match orientation {
            Orientation::Horizontal => Span::new(self.x0, self.x1),
            Orientation::Vertical => Span::new(self.y0, self.y1),
        }
    }
}

impl From<[i32; 4]> for Rect {
    fn from(v: [i32; 4]) -> Self {
        Rect::new(v[0], v[1], v[2], v[3])
    }
}

impl From<Rect> for [i32; 4] {
    fn from(r: Rect) -> Self {
        [r.x0, r.y0, r.x1, r.y1]
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})x[{},{})", self.x0, self.x1, self.y0, self.y1)
    }
}

/// A half-open interval along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: i32,
    pub end: i32,
}

impl Span {
    pub const fn new(start: i32, end: i32) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> i32 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn hull(&self, other: &Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }

    pub fn contains_span(&self, other: &Span) -> bool {
        self.start <= other.start && self.end >= other.end
    }

    /// Closed-interval membership: endpoints count as contact.
    pub fn touches(&self, v: i32) -> bool {
        v >= self.start && v <= self.end
    }

    /// Open-interval membership: the value lies strictly inside.
    pub fn strictly_contains(&self, v: i32) -> bool {
        v > self.start && v < self.end
    }

    /// Signed gap between two spans; negative when they overlap.
    pub fn gap(&self, other: &Span) -> i32 {
        self.start.max(other.start) - self.end.min(other.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Vertical,
    Horizontal,
}

/// Total area covered by a set of possibly overlapping rectangles.
pub fn union_area(rects: &[Rect]) -> i64 {
    covered_area(rects, |_| true)
}

/// Area covered by both rectangle sets.
pub fn intersection_area(a: &[Rect], b: &[Rect]) -> i64 {
    let mut all: Vec<Rect> = Vec::with_capacity(a.len() + b.len());
    all.extend_from_slice(a);
    all.extend_from_slice(b);
    let (xs, ys) = compress(&all);
    let mut total = 0i64;
    for wy in ys.windows(2) {
        for wx in xs.windows(2) {
            let cell = Rect::new(wx[0], wy[0], wx[1], wy[1]);
            if a.iter().any(|r| r.contains(&cell)) && b.iter().any(|r| r.contains(&cell)) {
                total += cell.area();
            }
        }
    }
    total
}

fn covered_area(rects: &[Rect], keep: impl Fn(&Rect) -> bool) -> i64 {
    let rects: Vec<Rect> = rects.iter().copied().filter(|r| !r.is_empty() && keep(r)).collect();
    let (xs, ys) = compress(&rects);
    let mut total = 0i64;
    for wy in ys.windows(2) {
        for wx in xs.windows(2) {
            let cell = Rect::new(wx[0], wy[0], wx[1], wy[1]);
            if rects.iter().any(|r| r.contains(&cell)) {
                total += cell.area();
            }
        }
    }
    total
}

fn compress(rects: &[Rect]) -> (Vec<i32>, Vec<i32>) {
    let mut xs: Vec<i32> = rects.iter().flat_map(|r| [r.x0, r.x1]).collect();
    let mut ys: Vec<i32> = rects.iter().flat_map(|r| [r.y0, r.y1]).collect();
    xs.sort_unstable();
    xs.dedup();
    ys.sort_unstable();
    ys.dedup();
    (xs, ys)
}
