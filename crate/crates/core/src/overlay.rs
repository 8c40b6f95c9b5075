//! Debug renderings of the pipeline stages.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::OverlayError;
use crate::geometry::Rect;
use crate::grid::SeparatorOrigin;
use crate::labels::{raw_color, InformativeLabel, LabelImage};
use crate::pipeline::{IssueResult, PageResult};

pub type Rgb = [u8; 3];

pub const WHITE: Rgb = [255, 255, 255];
pub const BLACK: Rgb = [0, 0, 0];
pub const ARROW: Rgb = [220, 20, 60];
pub const DETECTED_RULE: Rgb = [20, 20, 160];
pub const PROLONGED_RULE: Rgb = [0, 170, 220];
pub const TITLE_SEGMENT: Rgb = [200, 0, 160];
pub const BOX_OUTLINE: Rgb = [120, 120, 120];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlayStage {
    Labels,
    Smoothed,
    Lines,
    Grid,
    Articles,
    Order,
}

impl OverlayStage {
    pub const ALL: [OverlayStage; 6] = [
        OverlayStage::Labels,
        OverlayStage::Smoothed,
        OverlayStage::Lines,
        OverlayStage::Grid,
        OverlayStage::Articles,
        OverlayStage::Order,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OverlayStage::Labels => "labels",
            OverlayStage::Smoothed => "smoothed",
            OverlayStage::Lines => "lines",
            OverlayStage::Grid => "grid",
            OverlayStage::Articles => "articles",
            OverlayStage::Order => "order",
        }
    }
}

impl fmt::Display for OverlayStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OverlayStage {
    type Err = OverlayError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OverlayStage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| OverlayError::UnknownStage(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: u32, height: u32, fill: Rgb) -> Self {
        let data = fill.iter().copied().cycle().take(width as usize * height as usize * 3).collect();
        RgbImage { width, height, data }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: u32, y: u32) -> Rgb {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn put(&mut self, x: i32, y: i32, c: Rgb) {
        if x < 0 || y < 0 || x >= self.width as i32 || y >= self.height as i32 {
            return;
        }
        let i = (y as usize * self.width as usize + x as usize) * 3;
        self.data[i..i + 3].copy_from_slice(&c);
    }

    pub fn fill_rect(&mut self, r: Rect, c: Rgb) {
        for y in r.y0..r.y1 {
            for x in r.x0..r.x1 {
                self.put(x, y, c);
            }
        }
    }

    /// Blends `c` over the rectangle with weight `alpha` in 0..=255.
    pub fn tint_rect(&mut self, r: Rect, c: Rgb, alpha: u16) {
        for y in r.y0.max(0)..r.y1.min(self.height as i32) {
            for x in r.x0.max(0)..r.x1.min(self.width as i32) {
                let old = self.get(x as u32, y as u32);
                let mix = |o: u8, n: u8| ((o as u16 * (255 - alpha) + n as u16 * alpha) / 255) as u8;
                self.put(x, y, [mix(old[0], c[0]), mix(old[1], c[1]), mix(old[2], c[2])]);
            }
        }
    }

    pub fn outline(&mut self, r: Rect, c: Rgb) {
        self.fill_rect(Rect::new(r.x0, r.y0, r.x1, r.y0 + 1), c);
        self.fill_rect(Rect::new(r.x0, r.y1 - 1, r.x1, r.y1), c);
        self.fill_rect(Rect::new(r.x0, r.y0, r.x0 + 1, r.y1), c);
        self.fill_rect(Rect::new(r.x1 - 1, r.y0, r.x1, r.y1), c);
    }

    /// Straight segment of the given width.
    pub fn line(&mut self, from: (f64, f64), to: (f64, f64), width: i32, c: Rgb) {
        let steps = ((to.0 - from.0).abs().max((to.1 - from.1).abs()).ceil() as i32).max(1);
        let half = width / 2;
        for i in 0..=steps {
            let t = i as f64 / steps as f64;
            let x = (from.0 + (to.0 - from.0) * t).round() as i32;
            let y = (from.1 + (to.1 - from.1) * t).round() as i32;
            self.fill_rect(Rect::new(x - half, y - half, x - half + width, y - half + width), c);
        }
    }

    pub fn arrow(&mut self, from: (f64, f64), to: (f64, f64), c: Rgb) {
        self.line(from, to, 3, c);
        let (dx, dy) = (to.0 - from.0, to.1 - from.1);
        let len = (dx * dx + dy * dy).sqrt();
        if len < 1.0 {
            return;
        }
        let (ux, uy) = (dx / len, dy / len);
        let head = 14.0f64.min(len / 2.0);
        for sign in [-1.0, 1.0] {
            let (s, co) = (0.5f64.sin() * sign, 0.5f64.cos());
            let bx = -(ux * co - uy * s) * head;
            let by = -(ux * s + uy * co) * head;
            self.line(to, (to.0 + bx, to.1 + by), 3, c);
        }
    }

    /// Decimal number in a 3x5 pixel font scaled by `scale`, on a white
    /// plate, with its top-left corner at `(x, y)`.
    pub fn number(&mut self, x: i32, y: i32, n: usize, scale: i32, c: Rgb) {
        let digits: Vec<usize> = n.to_string().bytes().map(|b| (b - b'0') as usize).collect();
        let w = digits.len() as i32 * 4 * scale + scale;
        self.fill_rect(Rect::new(x, y, x + w, y + 7 * scale), WHITE);
        for (k, &d) in digits.iter().enumerate() {
            let ox = x + scale + k as i32 * 4 * scale;
            for (row, bits) in DIGITS[d].iter().enumerate() {
                for col in 0..3 {
                    if bits & (0b100 >> col) != 0 {
                        let px = ox + col * scale;
                        let py = y + scale + row as i32 * scale;
                        self.fill_rect(Rect::new(px, py, px + scale, py + scale), c);
                    }
                }
            }
        }
    }

    pub fn write_png(&self, sink: impl Write) -> std::io::Result<()> {
        let mut encoder = png::Encoder::new(sink, self.width, self.height);
        encoder.set_color(png::ColorType::Rgb);
        encoder.set_depth(png::BitDepth::Eight);
        let to_io = |e: png::EncodingError| match e {
            png::EncodingError::IoError(io) => io,
            other => std::io::Error::other(other.to_string()),
        };
        let mut writer = encoder.write_header().map_err(to_io)?;
        writer.write_image_data(&self.data).map_err(to_io)?;
        writer.finish().map_err(to_io)
    }
}

const DIGITS: [[u8; 5]; 10] = [
    [0b111, 0b101, 0b101, 0b101, 0b111],
    [0b010, 0b110, 0b010, 0b010, 0b111],
    [0b111, 0b001, 0b111, 0b100, 0b111],
    [0b111, 0b001, 0b111, 0b001, 0b111],
    [0b101, 0b101, 0b111, 0b001, 0b001],
    [0b111, 0b100, 0b111, 0b001, 0b111],
    [0b111, 0b100, 0b111, 0b101, 0b111],
    [0b111, 0b001, 0b010, 0b010, 0b010],
    [0b111, 0b101, 0b111, 0b101, 0b111],
    [0b111, 0b101, 0b111, 0b001, 0b111],
];

pub fn informative_color(label: InformativeLabel) -> Rgb {
    match label {
        InformativeLabel::Background => WHITE,
        InformativeLabel::TextLine => [40, 40, 40],
        InformativeLabel::Title => [200, 30, 30],
        InformativeLabel::VerticalSeparator => [30, 60, 220],
        InformativeLabel::HorizontalSeparator => [30, 170, 60],
        InformativeLabel::Noise => [230, 180, 20],
    }
}

/// Colour of the `i`-th item of a categorical rendering.
pub fn category_color(i: usize) -> Rgb {
    const TABLE: [Rgb; 12] = [
        [230, 25, 75],
        [60, 180, 75],
        [0, 130, 200],
        [245, 130, 48],
        [145, 30, 180],
        [70, 190, 190],
        [240, 50, 230],
        [150, 150, 0],
        [0, 128, 128],
        [170, 110, 40],
        [128, 0, 0],
        [0, 0, 128],
    ];
    TABLE[i % TABLE.len()]
}

/// Centre of the article's boxes on one page, if it has any there.
pub fn article_centroid(issue: &IssueResult, article: usize, page: usize) -> Option<(f64, f64)> {
    let p = &issue.pages[page];
    let rect = issue.articles[article]
        .boxes
        .iter()
        .filter(|b| b.page == page)
        .filter_map(|b| p.boxes.iter().find(|x| x.id == b.id).map(|x| x.bbox))
        .reduce(|a, b| a.hull(&b))?;
    Some(rect.center())
}

fn labels(img: &LabelImage) -> RgbImage {
    let mut out = RgbImage::new(img.width(), img.height(), WHITE);
    for y in 0..img.height() {
        for x in 0..img.width() {
            out.put(x as i32, y as i32, raw_color(img.get(x, y)));
        }
    }
    out
}

fn smoothed(page: &PageResult) -> RgbImage {
    let e = &page.entity;
    let mut out = RgbImage::new(e.width(), e.height(), WHITE);
    for y in 0..e.height() {
        for x in 0..e.width() {
            out.put(x as i32, y as i32, informative_color(e.get(x, y)));
        }
    }
    out
}

fn paint_lines(out: &mut RgbImage, page: &PageResult) {
    for (k, l) in page.lines.iter().enumerate() {
        let c = category_color(k);
        for (x, y) in l.pixels.iter() {
            out.put(x as i32, y as i32, c);
        }
    }
    for t in &page.grid.titles {
        for (x, y) in t.pixels.iter() {
            out.put(x as i32, y as i32, informative_color(InformativeLabel::Title));
        }
    }
}

fn paint_grid(out: &mut RgbImage, page: &PageResult) {
    for b in &page.all_boxes {
        out.outline(b.bbox, BOX_OUTLINE);
    }
    for t in &page.grid.titles {
        let y = t.segment_y();
        out.fill_rect(Rect::new(t.segment.start, y - 1, t.segment.end, y + 2), TITLE_SEGMENT);
    }
    for s in page.grid.verticals.iter().chain(&page.grid.horizontals) {
        let color = if s.origin == SeparatorOrigin::Prolonged { PROLONGED_RULE } else { DETECTED_RULE };
        let rect = |span: crate::Span| match s.orientation {
            crate::Orientation::Vertical => Rect::new(s.position - 1, span.start, s.position + 2, span.end),
            crate::Orientation::Horizontal => Rect::new(span.start, s.position - 1, span.end, s.position + 2),
        };
        out.fill_rect(rect(s.span), color);
        out.fill_rect(rect(s.detected), DETECTED_RULE);
    }
}

fn paint_articles(out: &mut RgbImage, issue: &IssueResult, page: usize) {
    let p = &issue.pages[page];
    for a in &issue.articles {
        let color = category_color(a.reading_index);
        for b in a.boxes.iter().filter(|b| b.page == page) {
            if let Some(gb) = p.boxes.iter().find(|x| x.id == b.id) {
                out.tint_rect(gb.bbox, color, 90);
                out.outline(gb.bbox, color);
            }
        }
        for l in a.text_lines.iter().filter(|l| l.page == page) {
            if let Some(line) = p.line(l.id) {
                for (x, y) in line.pixels.iter() {
                    out.put(x as i32, y as i32, color);
                }
            }
        }
    }
}

/// Renders one page of a segmented issue at the given stage.
pub fn render(stage: OverlayStage, img: &LabelImage, issue: &IssueResult, page: usize) -> RgbImage {
    let p = &issue.pages[page];
    match stage {
        OverlayStage::Labels => labels(img),
        OverlayStage::Smoothed => smoothed(p),
        OverlayStage::Lines => {
            let mut out = RgbImage::new(p.width, p.height, WHITE);
            paint_lines(&mut out, p);
            out
        }
        OverlayStage::Grid => {
            let mut out = RgbImage::new(p.width, p.height, WHITE);
            paint_lines(&mut out, p);
            paint_grid(&mut out, p);
            out
        }
        OverlayStage::Articles => {
            let mut out = RgbImage::new(p.width, p.height, WHITE);
            paint_articles(&mut out, issue, page);
            out
        }
        OverlayStage::Order => {
            let mut out = RgbImage::new(p.width, p.height, WHITE);
            paint_articles(&mut out, issue, page);
            let centres: Vec<(usize, (f64, f64))> = (0..issue.articles.len())
                .filter_map(|a| article_centroid(issue, a, page).map(|c| (issue.articles[a].reading_index, c)))
                .collect();
            for w in centres.windows(2) {
                out.arrow(w[0].1, w[1].1, ARROW);
            }
            for (n, (x, y)) in &centres {
                out.number(*x as i32 - 6, *y as i32 - 10, *n, 3, BLACK);
            }
            out
        }
    }
}
