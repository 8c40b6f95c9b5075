//! Discovery and loading of label maps.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use newsseg_core::config::InputFormat;
use newsseg_core::labels::{load_label_image, LabelMapFormat, Palette};
use newsseg_core::LabelImage;

use crate::corpus::Manifest;
use crate::fsutil::read_json;

/// Pages of one issue, in page order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IssueInput {
    pub id: String,
    pub date: Option<String>,
    pub pages: Vec<PathBuf>,
}

pub fn is_label_map(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()).as_deref(),
        Some("pgm") | Some("png")
    )
}

fn stem(path: &Path) -> String {
    path.file_stem().and_then(|s| s.to_str()).unwrap_or("page").to_string()
}

/// Resolves command-line inputs into issues: a directory with a
/// `manifest.json` is a corpus, any other directory is one issue made of
/// its label maps in name order, and a file is a single-page issue.
pub fn resolve_inputs(inputs: &[PathBuf]) -> Result<Vec<IssueInput>> {
    let mut issues = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let manifest = input.join("manifest.json");
            if manifest.is_file() {
                let m: Manifest = read_json(&manifest)?;
                for issue in m.issues {
                    issues.push(IssueInput {
                        id: issue.id,
                        date: issue.date,
                        pages: issue.pages.iter().map(|p| input.join(p)).collect(),
                    });
                }
                continue;
            }
            let mut pages: Vec<PathBuf> = fs::read_dir(input)
                .with_context(|| format!("listing {}", input.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && is_label_map(p))
                .collect();
            pages.sort();
            if pages.is_empty() {
                bail!("{} holds no label map", input.display());
            }
            let id = input
                .canonicalize()
                .ok()
                .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
                .unwrap_or_else(|| "issue".to_string());
            issues.push(IssueInput { id, date: None, pages });
        } else if input.is_file() {
            issues.push(IssueInput { id: stem(input), date: None, pages: vec![input.clone()] });
        } else {
            bail!("input {} does not exist", input.display());
        }
    }
    Ok(issues)
}

/// Palette sidecar of an indexed PNG: `<stem>.palette.json`.
pub fn palette_path(png: &Path) -> PathBuf {
    png.with_file_name(format!("{}.palette.json", stem(png)))
}

pub fn load_page(path: &Path, format: InputFormat) -> Result<LabelImage> {
    let ext = path.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase());
    let png = match format {
        InputFormat::Png => true,
        InputFormat::Pgm => false,
        InputFormat::Auto => ext.as_deref() == Some("png"),
    };
    let format = if png {
        let sidecar = palette_path(path);
        let palette = if sidecar.is_file() {
            let text = fs::read_to_string(&sidecar).with_context(|| format!("reading {}", sidecar.display()))?;
            Palette::from_json(text.as_bytes()).with_context(|| format!("palette {}", sidecar.display()))?
        } else {
            Palette::identity()
        };
        LabelMapFormat::IndexedPng(palette)
    } else {
        LabelMapFormat::Pgm
    };
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    load_label_image(BufReader::new(file), &format).with_context(|| format!("loading {}", path.display()))
}
