//! Synthetic corpora: generation and the manifest format.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use newsseg_core::labels::{save_label_image, LabelMapFormat};
use newsseg_core::synth::{issue_seed, LayoutFamily};
use serde::{Deserialize, Serialize};

use crate::fsutil::{write_atomic, write_json};

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestIssue {
    pub id: String,
    #[serde(default)]
    pub date: Option<String>,
    /// Label maps relative to the corpus directory, in page order.
    pub pages: Vec<String>,
    /// Issue ground truth relative to the corpus directory.
    #[serde(default)]
    pub gt: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Logical articles of the issue.
    #[serde(default)]
    pub articles: usize,
    /// Article count of each page's ground truth; a spanning article counts
    /// once on every page it touches.
    #[serde(default)]
    pub page_articles: Vec<usize>,
    #[serde(default)]
    pub spanning: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub recipe: Option<LayoutFamily>,
    pub issues: Vec<ManifestIssue>,
    #[serde(default)]
    pub total_pages: usize,
    #[serde(default)]
    pub total_articles: usize,
    #[serde(default)]
    pub total_page_articles: usize,
}

pub fn issue_id(index: usize) -> String {
    format!("issue-{index:04}")
}

pub fn page_file(page: usize) -> String {
    format!("p{:04}.pgm", page + 1)
}

pub fn page_gt_file(page: usize) -> String {
    format!("p{:04}.gt.json", page + 1)
}

pub fn load_recipe(path: &Path) -> Result<LayoutFamily> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let family: LayoutFamily = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    family.validate()?;
    Ok(family)
}

/// Draws `count` issues from `family` into `out`. Issue `i` is drawn with
/// `issue_seed(seed, i)`, so a corpus is a pure function of its inputs.
pub fn write_corpus(family: &LayoutFamily, seed: u64, count: usize, out: &Path) -> Result<Manifest> {
    family.validate()?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut issues = Vec::with_capacity(count);
    for i in 0..count {
        let id = issue_id(i);
        let s = issue_seed(seed, i as u64);
        let recipe = family.sample_issue(s);
        let (images, gt) = recipe.generate().with_context(|| format!("generating {id}"))?;
        let dir = out.join(&id);
        let mut pages = Vec::with_capacity(images.len());
        let mut page_articles = Vec::with_capacity(images.len());
        for (p, img) in images.iter().enumerate() {
            let mut bytes = Vec::new();
            save_label_image(img, &mut bytes, &LabelMapFormat::Pgm)?;
            write_atomic(&dir.join(page_file(p)), &bytes)?;
            let view = gt.page_view(p);
            page_articles.push(view.articles.len());
            write_atomic(&dir.join(page_gt_file(p)), view.to_json().as_bytes())?;
            pages.push(format!("{id}/{}", page_file(p)));
        }
        write_atomic(&dir.join("gt.json"), gt.to_json().as_bytes())?;
        issues.push(ManifestIssue {
            gt: Some(format!("{id}/gt.json")),
            id,
            date: None,
            pages,
            seed: Some(s),
            articles: gt.articles.len(),
            page_articles,
            spanning: recipe.spanning,
        });
    }
    let manifest = Manifest {
        version: MANIFEST_VERSION,
        seed: Some(seed),
        recipe: Some(family.clone()),
        total_pages: issues.iter().map(|i| i.pages.len()).sum(),
        total_articles: issues.iter().map(|i| i.articles).sum(),
        total_page_articles: issues.iter().flat_map(|i| &i.page_articles).sum(),
        issues,
    };
    write_json(&out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

/// Ground-truth file of an issue in a corpus directory.
pub fn gt_path(corpus: &Path, issue: &str) -> PathBuf {
    corpus.join(issue).join("gt.json")
}
