//! Label-map file formats.
//!
//! Two lossless encodings are supported:
//!
//! * binary PGM (`P5`, maxval 255) whose pixel values are raw codes, with an
//!   optional `# dpi=<n>` comment line;
//! * 8-bit (or packed 1/2/4-bit) indexed PNG plus a JSON sidecar mapping
//!   palette indices to raw codes.
//!
//! Files written by [`save_label_image`] are canonical: loading and saving
//! them again reproduces the same bytes.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{to_informative, InformativeLabel, LabelImage, RawLabel};
use crate::LabelMapError;

pub const CODE_TABLE_VERSION: u32 = 1;

/// Mapping from PNG palette index to raw code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Palette {
    pub version: u32,
    pub palette: BTreeMap<u8, u8>,
}

impl Palette {
    /// Index `i` maps to raw code `i` for all ten codes.
    pub fn identity() -> Self {
        Palette {
            version: CODE_TABLE_VERSION,
            palette: (0..RawLabel::COUNT as u8).map(|c| (c, c)).collect(),
        }
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, LabelMapError> {
        let p: Palette = serde_json::from_slice(bytes)
            .map_err(|e| LabelMapError::Palette(e.to_string()))?;
        if let Some((&idx, &code)) = p.palette.iter().find(|(_, &c)| RawLabel::new(c).is_none()) {
            return Err(LabelMapError::Palette(format!(
                "palette index {idx} maps to invalid raw code {code}"
            )));
        }
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("palette serializes");
        s.push('\n');
        s
    }

    fn lookup(&self, index: u8) -> Option<RawLabel> {
        self.palette.get(&index).and_then(|&c| RawLabel::new(c))
    }

    fn reverse(&self) -> BTreeMap<u8, u8> {
        let mut rev = BTreeMap::new();
        for (&idx, &code) in &self.palette {
            rev.entry(code).or_insert(idx);
        }
        rev
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelMapFormat {
    Pgm,
    IndexedPng(Palette),
}

pub fn load_label_image(source: impl Read, format: &LabelMapFormat) -> Result<LabelImage, LabelMapError> {
    match format {
        LabelMapFormat::Pgm => load_pgm(source),
        LabelMapFormat::IndexedPng(palette) => load_png(source, palette),
    }
}

pub fn save_label_image(
    img: &LabelImage,
    sink: impl Write,
    format: &LabelMapFormat,
) -> Result<(), LabelMapError> {
    match format {
        LabelMapFormat::Pgm => save_pgm(img, sink),
        LabelMapFormat::IndexedPng(palette) => save_png(img, sink, palette),
    }
}

fn load_pgm(mut source: impl Read) -> Result<LabelImage, LabelMapError> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    let mut cur = HeaderCursor { bytes: &bytes, pos: 0, dpi: None };
    if cur.bytes.get(..2) != Some(b"P5") {
        return Err(LabelMapError::MalformedHeader("missing P5 magic".into()));
    }
    cur.pos = 2;
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(LabelMapError::MalformedHeader("zero-sized image".into()));
    }
    if maxval == 0 || maxval > 255 {
        return Err(LabelMapError::MalformedHeader(format!("unsupported maxval {maxval}")));
    }
    // exactly one whitespace byte separates the header from the raster
    match cur.bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(LabelMapError::MalformedHeader("no raster separator".into())),
    }
    let dpi = cur.dpi;
    let data = &bytes[cur.pos..];
    let expected = width as usize * height as usize;
    if data.len() < expected {
        return Err(LabelMapError::TruncatedData { expected, got: data.len() });
    }
    Ok(LabelImage::from_codes(width, height, data)?.with_dpi(dpi))
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    dpi: Option<u32>,
}

impl HeaderCursor<'_> {
    fn skip_blank(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                let start = self.pos + 1;
                while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                    self.pos += 1;
                }
                let comment = String::from_utf8_lossy(&self.bytes[start..self.pos]);
                if let Some(v) = comment.trim().strip_prefix("dpi=") {
                    self.dpi = v.trim().parse().ok();
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32, LabelMapError> {
        self.skip_blank();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(LabelMapError::MalformedHeader(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| LabelMapError::MalformedHeader(format!("bad {what}")))
    }
}

fn save_pgm(img: &LabelImage, mut sink: impl Write) -> Result<(), LabelMapError> {
    let mut header = String::from("P5\n");
    if let Some(dpi) = img.dpi() {
        header.push_str(&format!("# dpi={dpi}\n"));
    }
    header.push_str(&format!("{} {}\n255\n", img.width(), img.height()));
    sink.write_all(header.as_bytes())?;
    let data: Vec<u8> = img.codes().collect();
    sink.write_all(&data)?;
    Ok(())
}

const METERS_PER_INCH: f64 = 0.0254;

fn load_png(source: impl Read, palette: &Palette) -> Result<LabelImage, LabelMapError> {
    let mut decoder = png::Decoder::new(source);
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(png_err)?;
    let (width, height, color, depth, dims) = {
        let info = reader.info();
        (info.width, info.height, info.color_type, info.bit_depth, info.pixel_dims)
    };
    if color != png::ColorType::Indexed {
        return Err(LabelMapError::MalformedHeader(format!(
            "expected an indexed PNG, found {color:?}"
        )));
    }
    let mut buf = vec![0u8; reader.output_buffer_size()];
    let frame = reader.next_frame(&mut buf).map_err(|e| match e {
        png::DecodingError::IoError(io) if io.kind() == std::io::ErrorKind::UnexpectedEof => {
            LabelMapError::TruncatedData { expected: width as usize * height as usize, got: 0 }
        }
        other => png_err(other),
    })?;
    let bits = depth as u8 as usize;
    let per_byte = 8 / bits;
    let mask = ((1u16 << bits) - 1) as u8;
    let mut codes = Vec::with_capacity(width as usize * height as usize);
    for y in 0..height as usize {
        let line = &buf[y * frame.line_size..(y + 1) * frame.line_size];
        for x in 0..width as usize {
            let byte = line[x / per_byte];
            let shift = 8 - bits * (x % per_byte + 1);
            let index = (byte >> shift) & mask;
            let raw = palette.lookup(index).ok_or(LabelMapError::InvalidLabelCode {
                x: x as u32,
                y: y as u32,
                value: index as u32,
            })?;
            codes.push(raw.code());
        }
    }
    let dpi = dims.and_then(|d| match d.unit {
        png::Unit::Meter => Some((d.xppu as f64 * METERS_PER_INCH).round() as u32),
        png::Unit::Unspecified => None,
    });
    Ok(LabelImage::from_codes(width, height, &codes)?.with_dpi(dpi))
}

fn save_png(img: &LabelImage, sink: impl Write, palette: &Palette) -> Result<(), LabelMapError> {
    let reverse = palette.reverse();
    let mut data = Vec::with_capacity(img.labels().len());
    for (i, label) in img.labels().iter().enumerate() {
        let idx = reverse.get(&label.code()).ok_or_else(|| {
            LabelMapError::Palette(format!(
                "raw code {} at pixel {} has no palette index",
                label.code(),
                i
            ))
        })?;
        data.push(*idx);
    }
    let entries = palette.palette.keys().max().map_or(1, |&m| m as usize + 1);
    let mut rgb = Vec::with_capacity(entries * 3);
    for idx in 0..entries {
        let color = palette
            .lookup(idx as u8)
            .map_or([0, 0, 0], raw_color);
        rgb.extend_from_slice(&color);
    }
    let mut encoder = png::Encoder::new(sink, img.width(), img.height());
    encoder.set_color(png::ColorType::Indexed);
    encoder.set_depth(png::BitDepth::Eight);
    encoder.set_palette(rgb);
    encoder.set_compression(png::Compression::Default);
    if let Some(dpi) = img.dpi() {
        let ppm = (dpi as f64 / METERS_PER_INCH).round() as u32;
        encoder.set_pixel_dims(Some(png::PixelDimensions { xppu: ppm, yppu: ppm, unit: png::Unit::Meter }));
    }
    let mut writer = encoder.write_header().map_err(png_enc_err)?;
    writer.write_image_data(&data).map_err(png_enc_err)?;
    writer.finish().map_err(png_enc_err)?;
    Ok(())
}

fn png_err(e: png::DecodingError) -> LabelMapError {
    match e {
        png::DecodingError::IoError(io) => LabelMapError::Io(io),
        other => LabelMapError::MalformedHeader(other.to_string()),
    }
}

fn png_enc_err(e: png::EncodingError) -> LabelMapError {
    match e {
        png::EncodingError::IoError(io) => LabelMapError::Io(io),
        other => LabelMapError::Png(other.to_string()),
    }
}

/// Display colour used for raw codes in palettes and overlays.
pub fn raw_color(raw: RawLabel) -> [u8; 3] {
    match raw.code() {
        0 => [255, 255, 255],
        1 => [40, 40, 40],
        2 => [90, 90, 90],
        3 => [140, 140, 140],
        4 => [200, 30, 30],
        5 => [230, 90, 90],
        6 => [250, 150, 150],
        7 => [30, 60, 220],
        8 => [30, 170, 60],
        _ => [230, 180, 20],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeTableEntry {
    pub code: u8,
    pub name: String,
    pub informative: InformativeLabel,
    pub informative_code: u8,
}

/// The published raw-code table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeTable {
    pub version: u32,
    pub codes: Vec<CodeTableEntry>,
}

pub fn code_table() -> CodeTable {
    CodeTable {
        version: CODE_TABLE_VERSION,
        codes: RawLabel::ALL
            .iter()
            .map(|&raw| {
                let informative = to_informative(raw);
                CodeTableEntry {
                    code: raw.code(),
                    name: raw.name().to_string(),
                    informative,
                    informative_code: informative.code(),
                }
            })
            .collect(),
    }
}

impl CodeTable {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("code table serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rect;

    fn sample() -> LabelImage {
        let mut img = LabelImage::new(7, 5).with_dpi(Some(300));
        img.fill_rect(Rect::new(1, 1, 6, 2), RawLabel::CHARACTER);
        img.fill_rect(Rect::new(3, 3, 4, 5), RawLabel::VERTICAL_SEPARATOR);
        img.set(6, 4, RawLabel::NOISE);
        img
    }

    #[test]
    fn uniform_background_pgm() {
        let mut bytes = b"P5\n4 3\n255\n".to_vec();
        bytes.extend_from_slice(&[0; 12]);
        let img = load_label_image(&bytes[..], &LabelMapFormat::Pgm).unwrap();
        assert_eq!((img.width(), img.height()), (4, 3));
        assert!(img.labels().iter().all(|l| l.is_background()));
    }

    #[test]
    fn pgm_rejects_code_14() {
        let mut bytes = b"P5\n# produced upstream\n3 1\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 14, 0]);
        let err = load_label_image(&bytes[..], &LabelMapFormat::Pgm).unwrap_err();
        assert!(matches!(err, LabelMapError::InvalidLabelCode { x: 1, y: 0, value: 14 }), "{err:?}");
    }

    #[test]
    fn pgm_header_and_truncation_errors() {
        let err = load_label_image(&b"P6\n1 1\n255\n\0"[..], &LabelMapFormat::Pgm).unwrap_err();
        assert!(matches!(err, LabelMapError::MalformedHeader(_)));
        let err = load_label_image(&b"P5\n1\n"[..], &LabelMapFormat::Pgm).unwrap_err();
        assert!(matches!(err, LabelMapError::MalformedHeader(_)));
        let err = load_label_image(&b"P5\n4 4\n255\n\0\0"[..], &LabelMapFormat::Pgm).unwrap_err();
        assert!(matches!(err, LabelMapError::TruncatedData { expected: 16, got: 2 }));
    }

    #[test]
    fn pgm_roundtrip_is_byte_identical() {
        let img = sample();
        let mut a = Vec::new();
        save_label_image(&img, &mut a, &LabelMapFormat::Pgm).unwrap();
        let back = load_label_image(&a[..], &LabelMapFormat::Pgm).unwrap();
        assert_eq!(back, img);
        let mut b = Vec::new();
        save_label_image(&back, &mut b, &LabelMapFormat::Pgm).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn png_roundtrip_is_byte_identical() {
        let img = sample();
        let fmt = LabelMapFormat::IndexedPng(Palette::identity());
        let mut a = Vec::new();
        save_label_image(&img, &mut a, &fmt).unwrap();
        let back = load_label_image(&a[..], &fmt).unwrap();
        assert_eq!(back, img);
        let mut b = Vec::new();
        save_label_image(&back, &mut b, &fmt).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn png_with_custom_palette() {
        let mut palette = Palette::identity();
        palette.palette = [(3u8, 0u8), (0, 1), (5, 7)].into_iter().collect();
        let mut img = LabelImage::new(3, 1);
        img.set(1, 0, RawLabel::CHARACTER);
        img.set(2, 0, RawLabel::VERTICAL_SEPARATOR);
        let fmt = LabelMapFormat::IndexedPng(palette.clone());
        let mut bytes = Vec::new();
        save_label_image(&img, &mut bytes, &fmt).unwrap();
        assert_eq!(load_label_image(&bytes[..], &fmt).unwrap(), img);

        // an index missing from the sidecar is an invalid code
        let mut narrow = palette;
        narrow.palette.remove(&5);
        let err = load_label_image(&bytes[..], &LabelMapFormat::IndexedPng(narrow)).unwrap_err();
        assert!(matches!(err, LabelMapError::InvalidLabelCode { x: 2, y: 0, value: 5 }));
    }

    #[test]
    fn palette_json_validates_codes() {
        let ok = Palette::from_json(br#"{"version":1,"palette":{"0":0,"17":9}}"#).unwrap();
        assert_eq!(ok.palette.get(&17), Some(&9));
        assert!(Palette::from_json(br#"{"version":1,"palette":{"0":12}}"#).is_err());
        assert!(Palette::from_json(br#"{"version":1,"palette":{},"extra":1}"#).is_err());
        assert_eq!(Palette::from_json(Palette::identity().to_json().as_bytes()).unwrap(), Palette::identity());
    }

    #[test]
    fn shipped_code_table_matches() {
        let shipped = include_str!("../../../../docs/label-codes.json");
        assert_eq!(shipped, code_table().to_json());
    }
}
