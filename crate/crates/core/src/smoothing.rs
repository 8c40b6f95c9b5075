//! Connected components over the raw label map and per-component majority
//! vote.
//!
//! Components are built from all non-background pixels regardless of their
//! label, then every pixel of a component receives the informative label
//! with the largest pixel count inside that component.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::geometry::Rect;
use crate::labels::{to_informative, InformativeLabel, LabelImage};
use crate::pixels::{PixelSet, Run};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

/// Per-component pixel counts of each informative label.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LabelHistogram([u64; 6]);

impl LabelHistogram {
    pub fn get(&self, label: InformativeLabel) -> u64 {
        self.0[label.index()]
    }

    pub fn add(&mut self, label: InformativeLabel, n: u64) {
        self.0[label.index()] += n;
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Label with the highest count; ties go to the label listed first in
    /// `priority`.
    pub fn argmax(&self, priority: &LabelPriority) -> InformativeLabel {
        let mut best = priority.0[0];
        for &label in &priority.0[1..] {
            if self.get(label) > self.get(best) {
                best = label;
            }
        }
        best
    }
}

/// Tie-break order among the five non-background labels, strongest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<InformativeLabel>", into = "Vec<InformativeLabel>")]
pub struct LabelPriority([InformativeLabel; 5]);

impl LabelPriority {
    pub fn new(order: [InformativeLabel; 5]) -> Result<Self, String> {
        let mut seen = [false; 6];
        for l in order {
            if l == InformativeLabel::Background {
                return Err("background cannot take part in the vote".into());
            }
            if std::mem::replace(&mut seen[l.index()], true) {
                return Err(format!("label {l} listed twice"));
            }
        }
        Ok(LabelPriority(order))
    }

    pub fn order(&self) -> &[InformativeLabel; 5] {
        &self.0
    }
}

impl Default for LabelPriority {
    fn default() -> Self {
        LabelPriority([
            InformativeLabel::VerticalSeparator,
            InformativeLabel::HorizontalSeparator,
            InformativeLabel::Title,
            InformativeLabel::TextLine,
            InformativeLabel::Noise,
        ])
    }
}

impl TryFrom<Vec<InformativeLabel>> for LabelPriority {
    type Error = String;

    fn try_from(v: Vec<InformativeLabel>) -> Result<Self, Self::Error> {
        let arr: [InformativeLabel; 5] = v
            .try_into()
            .map_err(|v: Vec<_>| format!("tie-break order needs 5 labels, got {}", v.len()))?;
        LabelPriority::new(arr)
    }
}

impl From<LabelPriority> for Vec<InformativeLabel> {
    fn from(p: LabelPriority) -> Self {
        p.0.to_vec()
    }
}

/// A connected set of non-background pixels of the raw label map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub id: usize,
    pub pixels: PixelSet,
    pub histogram: LabelHistogram,
    pub bbox: Rect,
}

/// Label map after the vote, in informative labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityImage {
    width: u32,
    height: u32,
    labels: Vec<InformativeLabel>,
}

/// A connected single-label region of an [`EntityImage`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entity {
    pub label: InformativeLabel,
    pub pixels: PixelSet,
    pub bbox: Rect,
}

impl EntityImage {
    pub fn new(width: u32, height: u32) -> Self {
        EntityImage {
            width,
            height,
            labels: vec![InformativeLabel::Background; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn labels(&self) -> &[InformativeLabel] {
        &self.labels
    }

    pub fn get(&self, x: u32, y: u32) -> InformativeLabel {
        self.labels[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, label: InformativeLabel) {
        let w = self.width as usize;
        self.labels[y as usize * w + x as usize] = label;
    }

    pub fn fill_rect(&mut self, rect: Rect, label: InformativeLabel) {
        let clip = |v: i32, hi: u32| v.clamp(0, hi as i32) as usize;
        let (x0, x1) = (clip(rect.x0, self.width), clip(rect.x1, self.width));
        if x1 <= x0 {
            return;
        }
        for y in clip(rect.y0, self.height)..clip(rect.y1, self.height) {
            let row = y * self.width as usize;
            self.labels[row + x0..row + x1].fill(label);
        }
    }

    pub fn page_rect(&self) -> Rect {
        Rect::new(0, 0, self.width as i32, self.height as i32)
    }

    /// Connected regions of identical non-background label, in raster order
    /// of their first pixel.
    pub fn entities(&self, connectivity: Connectivity) -> Vec<Entity> {
        let labels = &self.labels;
        let groups = label_runs(self.width, self.height, connectivity, |i| labels[i].code());
        groups
            .into_iter()
            .map(|runs| {
                let first = runs[0];
                let label = self.get(first.x0, first.y);
                let pixels = PixelSet::from_runs(runs);
                let bbox = pixels.bbox();
                Entity { label, pixels, bbox }
            })
            .collect()
    }

    pub fn count(&self, label: InformativeLabel) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Debug dump as binary PGM with informative codes as pixel values.
    pub fn write_pgm(&self, mut sink: impl Write) -> std::io::Result<()> {
        write!(sink, "P5\n{} {}\n255\n", self.width, self.height)?;
        let data: Vec<u8> = self.labels.iter().map(|l| l.code()).collect();
        sink.write_all(&data)
    }
}

/// Extracts the connected components of all non-background pixels.
///
/// Components are returned in raster order of their first pixel and their
/// ids are their positions in the returned list.
pub fn connected_components(img: &LabelImage, connectivity: Connectivity) -> Vec<Component> {
    let labels = img.labels();
    let groups = label_runs(img.width(), img.height(), connectivity, |i| {
        u8::from(!labels[i].is_background())
    });
    groups
        .into_iter()
        .enumerate()
        .map(|(id, runs)| {
            let mut histogram = LabelHistogram::default();
            for r in &runs {
                let row = r.y as usize * img.width() as usize;
                for &raw in &labels[row + r.x0 as usize..row + r.x1 as usize] {
                    histogram.add(to_informative(raw), 1);
                }
            }
            let pixels = PixelSet::from_runs(runs);
            let bbox = pixels.bbox();
            Component { id, pixels, histogram, bbox }
        })
        .collect()
}

/// Replaces every component's labels by its majority label.
pub fn majority_vote_smooth(
    img: &LabelImage,
    connectivity: Connectivity,
    priority: &LabelPriority,
) -> EntityImage {
    let mut out = EntityImage::new(img.width(), img.height());
    for comp in connected_components(img, connectivity) {
        let winner = comp.histogram.argmax(priority);
        for r in comp.pixels.runs() {
            let row = r.y as usize * img.width() as usize;
            out.labels[row + r.x0 as usize..row + r.x1 as usize].fill(winner);
        }
    }
    out
}

/// Run-based two-pass labelling.
///
/// `class` returns 0 for background; runs are maximal spans of one non-zero
/// class and only runs of the same class are joined. Returns the runs of
/// each component, components ordered by their first run.
pub(crate) fn label_runs(
    width: u32,
    height: u32,
    connectivity: Connectivity,
    class: impl Fn(usize) -> u8,
) -> Vec<Vec<Run>> {
    let w = width as usize;
    let mut runs: Vec<Run> = Vec::new();
    let mut run_class: Vec<u8> = Vec::new();
    let mut row_start: Vec<usize> = Vec::with_capacity(height as usize + 1);
    for y in 0..height as usize {
        row_start.push(runs.len());
        let mut x = 0usize;
        while x < w {
            let c = class(y * w + x);
            if c == 0 {
                x += 1;
                continue;
            }
            let start = x;
            while x < w && class(y * w + x) == c {
                x += 1;
            }
            runs.push(Run { y: y as u32, x0: start as u32, x1: x as u32 });
            run_class.push(c);
        }
    }
    row_start.push(runs.len());

    let mut uf = UnionFind::new(runs.len());
    let reach = match connectivity {
        Connectivity::Four => 0,
        Connectivity::Eight => 1,
    };
    for y in 1..height as usize {
        let prev = row_start[y - 1]..row_start[y];
        let cur = row_start[y]..row_start[y + 1];
        let mut p = prev.start;
        for c in cur {
            let cr = runs[c];
            // skip previous-row runs that end too far left
            while p < prev.end && runs[p].x1 + reach <= cr.x0 {
                p += 1;
            }
            let mut q = p;
            while q < prev.end && runs[q].x0 < cr.x1 + reach {
                if run_class[q] == run_class[c] {
                    uf.union(q, c);
                }
                q += 1;
            }
        }
    }

    let mut comp_of_root: Vec<usize> = vec![usize::MAX; runs.len()];
    let mut groups: Vec<Vec<Run>> = Vec::new();
    for (i, &r) in runs.iter().enumerate() {
        let root = uf.find(i);
        if comp_of_root[root] == usize::MAX {
            comp_of_root[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[comp_of_root[root]].push(r);
    }
    groups
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller index wins so roots are deterministic
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::RawLabel;

    #[test]
    fn all_background_has_no_components() {
        let img = LabelImage::new(5, 4);
        assert!(connected_components(&img, Connectivity::Eight).is_empty());
    }

    #[test]
    fn adjacent_text_and_title_pixels_form_one_component() {
        let mut img = LabelImage::new(4, 3);
        img.set(1, 1, RawLabel::CHARACTER);
        img.set(2, 1, RawLabel::TITLE_CHARACTER);
        let comps = connected_components(&img, Connectivity::Four);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].histogram.get(InformativeLabel::TextLine), 1);
        assert_eq!(comps[0].histogram.get(InformativeLabel::Title), 1);
        assert_eq!(comps[0].histogram.total(), 2);
    }

    #[test]
    fn diagonal_neighbours_depend_on_connectivity() {
        let mut img = LabelImage::new(3, 3);
        img.set(0, 0, RawLabel::CHARACTER);
        img.set(1, 1, RawLabel::CHARACTER);
        assert_eq!(connected_components(&img, Connectivity::Four).len(), 2);
        assert_eq!(connected_components(&img, Connectivity::Eight).len(), 1);
    }

    #[test]
    fn strict_majority_wins() {
        let mut img = LabelImage::new(7, 1);
        img.fill_rect(Rect::new(0, 0, 5, 1), RawLabel::INTER_WORD);
        img.fill_rect(Rect::new(5, 0, 7, 1), RawLabel::TITLE_CHARACTER);
        let out = majority_vote_smooth(&img, Connectivity::Eight, &LabelPriority::default());
        assert_eq!(out.count(InformativeLabel::TextLine), 7);
    }

    #[test]
    fn ties_follow_priority() {
        let mut img = LabelImage::new(4, 1);
        img.fill_rect(Rect::new(0, 0, 2, 1), RawLabel::CHARACTER);
        img.fill_rect(Rect::new(2, 0, 4, 1), RawLabel::HORIZONTAL_SEPARATOR);
        let out = majority_vote_smooth(&img, Connectivity::Eight, &LabelPriority::default());
        assert_eq!(out.count(InformativeLabel::HorizontalSeparator), 4);

        let text_first = LabelPriority::new([
            InformativeLabel::TextLine,
            InformativeLabel::Title,
            InformativeLabel::VerticalSeparator,
            InformativeLabel::HorizontalSeparator,
            InformativeLabel::Noise,
        ])
        .unwrap();
        let out = majority_vote_smooth(&img, Connectivity::Eight, &text_first);
        assert_eq!(out.count(InformativeLabel::TextLine), 4);
    }

    #[test]
    fn uniform_component_is_unchanged() {
        let mut img = LabelImage::new(6, 6);
        img.fill_rect(Rect::new(1, 1, 5, 3), RawLabel::VERTICAL_SEPARATOR);
        let out = majority_vote_smooth(&img, Connectivity::Eight, &LabelPriority::default());
        for y in 0..6 {
            for x in 0..6 {
                assert_eq!(out.get(x, y), to_informative(img.get(x, y)));
            }
        }
    }

    #[test]
    fn priority_rejects_bad_orders() {
        use InformativeLabel::*;
        assert!(LabelPriority::new([Title, Title, TextLine, Noise, VerticalSeparator]).is_err());
        assert!(LabelPriority::new([Background, Title, TextLine, Noise, VerticalSeparator]).is_err());
        let json = serde_json::to_string(&LabelPriority::default()).unwrap();
        assert_eq!(
            json,
            r#"["vertical_separator","horizontal_separator","title","text_line","noise"]"#
        );
    }

    #[test]
    fn entity_components_split_on_label() {
        let mut e = EntityImage::new(6, 2);
        e.fill_rect(Rect::new(0, 0, 3, 2), InformativeLabel::TextLine);
        e.fill_rect(Rect::new(3, 0, 6, 2), InformativeLabel::Title);
        let ents = e.entities(Connectivity::Eight);
        assert_eq!(ents.len(), 2);
        assert_eq!(ents[0].label, InformativeLabel::TextLine);
        assert_eq!(ents[1].bbox, Rect::new(3, 0, 6, 2));
    }
}
