//! Label taxonomy and label-map images.
//!
//! The upstream pixel classifier distinguishes ten raw labels. Layout logic
//! works on six informative labels obtained by grouping the three
//! title-family codes and the three text-family codes.

mod io;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use io::{
    code_table, load_label_image, save_label_image, CodeTable, CodeTableEntry, raw_color, LabelMapFormat,
    Palette, CODE_TABLE_VERSION,
};

/// One of the ten raw codes emitted by the pixel labeller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
#[repr(transparent)]
pub struct RawLabel(u8);

impl RawLabel {
    pub const BACKGROUND: RawLabel = RawLabel(0);
    pub const CHARACTER: RawLabel = RawLabel(1);
    pub const INTER_CHARACTER: RawLabel = RawLabel(2);
    pub const INTER_WORD: RawLabel = RawLabel(3);
    pub const TITLE_CHARACTER: RawLabel = RawLabel(4);
    pub const TITLE_INTER_CHARACTER: RawLabel = RawLabel(5);
    pub const TITLE_INTER_WORD: RawLabel = RawLabel(6);
    pub const VERTICAL_SEPARATOR: RawLabel = RawLabel(7);
    pub const HORIZONTAL_SEPARATOR: RawLabel = RawLabel(8);
    pub const NOISE: RawLabel = RawLabel(9);

    pub const COUNT: usize = 10;

    pub const ALL: [RawLabel; RawLabel::COUNT] = [
        RawLabel::BACKGROUND,
        RawLabel::CHARACTER,
        RawLabel::INTER_CHARACTER,
        RawLabel::INTER_WORD,
        RawLabel::TITLE_CHARACTER,
        RawLabel::TITLE_INTER_CHARACTER,
        RawLabel::TITLE_INTER_WORD,
        RawLabel::VERTICAL_SEPARATOR,
        RawLabel::HORIZONTAL_SEPARATOR,
        RawLabel::NOISE,
    ];

    pub const fn new(code: u8) -> Option<RawLabel> {
        if (code as usize) < RawLabel::COUNT {
            Some(RawLabel(code))
        } else {
            None
        }
    }

    pub const fn code(self) -> u8 {
        self.0
    }

    pub fn name(self) -> &'static str {
        match self.0 {
            0 => "background",
            1 => "character",
            2 => "inter-character",
            3 => "inter-word",
            4 => "title character",
            5 => "title inter-character",
            6 => "title inter-word",
            7 => "vertical separator",
            8 => "horizontal separator",
            _ => "noise",
        }
    }

    pub fn is_background(self) -> bool {
        self == RawLabel::BACKGROUND
    }

    pub fn informative(self) -> InformativeLabel {
        to_informative(self)
    }
}

impl TryFrom<u8> for RawLabel {
    type Error = String;

    fn try_from(code: u8) -> Result<Self, Self::Error> {
        RawLabel::new(code).ok_or_else(|| format!("raw label code {code} outside 0..=9"))
    }
}

impl From<RawLabel> for u8 {
    fn from(l: RawLabel) -> u8 {
        l.0
    }
}

impl fmt::Display for RawLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.0, self.name())
    }
}

/// The six classes consumed by the layout analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum InformativeLabel {
    Background = 0,
    TextLine = 1,
    Title = 2,
    VerticalSeparator = 3,
    HorizontalSeparator = 4,
    Noise = 5,
}

impl InformativeLabel {
    pub const ALL: [InformativeLabel; 6] = [
        InformativeLabel::Background,
        InformativeLabel::TextLine,
        InformativeLabel::Title,
        InformativeLabel::VerticalSeparator,
        InformativeLabel::HorizontalSeparator,
        InformativeLabel::Noise,
    ];

    pub const fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<InformativeLabel> {
        InformativeLabel::ALL.get(code as usize).copied()
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_separator(self) -> bool {
        matches!(self, InformativeLabel::VerticalSeparator | InformativeLabel::HorizontalSeparator)
    }
}

impl fmt::Display for InformativeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            InformativeLabel::Background => "background",
            InformativeLabel::TextLine => "text line",
            InformativeLabel::Title => "title",
            InformativeLabel::VerticalSeparator => "vertical separator",
            InformativeLabel::HorizontalSeparator => "horizontal separator",
            InformativeLabel::Noise => "noise",
        };
        f.write_str(s)
    }
}

/// Groups a raw code into its informative class.
pub fn to_informative(raw: RawLabel) -> InformativeLabel {
    match raw.0 {
        0 => InformativeLabel::Background,
        1..=3 => InformativeLabel::TextLine,
        4..=6 => InformativeLabel::Title,
        7 => InformativeLabel::VerticalSeparator,
        8 => InformativeLabel::HorizontalSeparator,
        _ => InformativeLabel::Noise,
    }
}

/// Dense raw-label map of one page, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelImage {
    width: u32,
    height: u32,
    labels: Vec<RawLabel>,
    dpi: Option<u32>,
}

impl LabelImage {
    /// Page filled with background.
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width > 0 && height > 0, "label image must be non-empty");
        LabelImage {
            width,
            height,
            labels: vec![RawLabel::BACKGROUND; width as usize * height as usize],
            dpi: None,
        }
    }

    /// Wraps raw codes; fails with the first out-of-range code.
    pub fn from_codes(width: u32, height: u32, codes: &[u8]) -> Result<Self, crate::LabelMapError> {
        if width == 0 || height == 0 {
            return Err(crate::LabelMapError::MalformedHeader("zero-sized image".into()));
        }
        let expected = width as usize * height as usize;
        if codes.len() < expected {
            return Err(crate::LabelMapError::TruncatedData { expected, got: codes.len() });
        }
        let labels = codes[..expected]
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                RawLabel::new(c).ok_or(crate::LabelMapError::InvalidLabelCode {
                    x: (i % width as usize) as u32,
                    y: (i / width as usize) as u32,
                    value: c as u32,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LabelImage { width, height, labels, dpi: None })
    }

    pub fn with_dpi(mut self, dpi: Option<u32>) -> Self {
        self.dpi = dpi;
        self
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dpi(&self) -> Option<u32> {
        self.dpi
    }

    pub fn labels(&self) -> &[RawLabel] {
        &self.labels
    }

    pub fn codes(&self) -> impl Iterator<Item = u8> + '_ {
        self.labels.iter().map(|l| l.0)
    }

    pub fn get(&self, x: u32, y: u32) -> RawLabel {
        self.labels[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, label: RawLabel) {
        let w = self.width as usize;
        self.labels[y as usize * w + x as usize] = label;
    }

    /// Paints a rectangle clipped to the page.
    pub fn fill_rect(&mut self, rect: crate::Rect, label: RawLabel) {
        let x0 = rect.x0.clamp(0, self.width as i32) as u32;
        let x1 = rect.x1.clamp(0, self.width as i32) as u32;
        let y0 = rect.y0.clamp(0, self.height as i32) as u32;
        let y1 = rect.y1.clamp(0, self.height as i32) as u32;
        if x1 <= x0 {
            return;
        }
        for y in y0..y1 {
            let row = y as usize * self.width as usize;
            self.labels[row + x0 as usize..row + x1 as usize].fill(label);
        }
    }

    pub fn page_rect(&self) -> crate::Rect {
        crate::Rect::new(0, 0, self.width as i32, self.height as i32)
    }
}
