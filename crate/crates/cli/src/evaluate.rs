//! The `eval` command.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Result;
use newsseg_core::eval::{combine, evaluate, ArticleSet, EvalReport};
use newsseg_core::EvalError;
use serde::{Deserialize, Serialize};

use crate::corpus::Manifest;
use crate::fsutil::read_json;

pub const ARTICLES_FILE: &str = "articles.json";
pub const GT_FILE: &str = "gt.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IssueReport {
    pub id: String,
    pub report: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub total: EvalReport,
    pub issues: Vec<IssueReport>,
}

impl CorpusReport {
    pub fn to_table(&self) -> String {
        let mut s = self.total.to_table();
        if self.issues.len() > 1 {
            for i in &self.issues {
                let _ = write!(s, "\n[{}]\n{}", i.id, i.report.to_table());
            }
        }
        s
    }
}

fn subdirs_with(dir: &Path, file: &str) -> Result<BTreeSet<String>> {
    let mut ids = BTreeSet::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.join(file).is_file() {
            if let Some(name) = path.file_name() {
                ids.insert(name.to_string_lossy().into_owned());
            }
        }
    }
    Ok(ids)
}

fn single(path: &Path, file: &str) -> Option<PathBuf> {
    if path.is_file() {
        Some(path.to_path_buf())
    } else if path.join(file).is_file() {
        Some(path.join(file))
    } else {
        None
    }
}

/// Scores segmenter output against ground truth. Both sides are either one
/// issue (an `articles.json` / `gt.json` file or a directory holding it) or
/// a directory of issue directories. Every predicted issue needs ground
/// truth; a ground-truth issue without prediction scores as all missed.
pub fn cmd_eval(predicted: &Path, gt: &Path, iou_threshold: f64) -> Result<CorpusReport> {
    let pairs: Vec<(String, Option<PathBuf>, PathBuf)> = match (single(predicted, ARTICLES_FILE), single(gt, GT_FILE)) {
        (Some(p), Some(g)) => vec![(issue_name(&g), Some(p), g)],
        (Some(_), None) => return Err(EvalError::MissingGroundTruth(gt.join(GT_FILE)).into()),
        (None, _) => {
            let pred_ids = if predicted.is_dir() { subdirs_with(predicted, ARTICLES_FILE)? } else { BTreeSet::new() };
            let gt_paths = gt_issues(gt)?;
            let mut pairs = Vec::new();
            for id in &pred_ids {
                let g = gt_paths
                    .iter()
                    .find(|(gid, _)| gid == id)
                    .map(|(_, p)| p.clone())
                    .unwrap_or_else(|| gt.join(id).join(GT_FILE));
                if !g.is_file() {
                    return Err(EvalError::MissingGroundTruth(g).into());
                }
                pairs.push((id.clone(), Some(predicted.join(id).join(ARTICLES_FILE)), g));
            }
            for (id, g) in gt_paths {
                if !pred_ids.contains(&id) {
                    pairs.push((id, None, g));
                }
            }
            pairs.sort_by(|a, b| a.0.cmp(&b.0));
            pairs
        }
    };
    let mut issues = Vec::with_capacity(pairs.len());
    for (id, pred, g) in pairs {
        let gt_set: ArticleSet = read_json(&g)?;
        let pred_set: ArticleSet = match pred {
            Some(p) => read_json(&p)?,
            None => ArticleSet::default(),
        };
        let report = evaluate(&pred_set.articles, &gt_set.articles, iou_threshold)?;
        issues.push(IssueReport { id, report });
    }
    let reports: Vec<EvalReport> = issues.iter().map(|i| i.report.clone()).collect();
    let mut total = combine(&reports)?;
    if let [only] = issues.as_slice() {
        total.per_page = only.report.per_page.clone();
    }
    Ok(CorpusReport { total, issues })
}

fn issue_name(gt_file: &Path) -> String {
    gt_file
        .parent()
        .and_then(|p| p.file_name())
        .map_or_else(|| "issue".to_string(), |n| n.to_string_lossy().into_owned())
}

fn gt_issues(gt: &Path) -> Result<Vec<(String, PathBuf)>> {
    let manifest = gt.join("manifest.json");
    if manifest.is_file() {
        let m: Manifest = read_json(&manifest)?;
        return Ok(m
            .issues
            .into_iter()
            .map(|i| {
                let path = i.gt.as_ref().map_or_else(|| gt.join(&i.id).join(GT_FILE), |g| gt.join(g));
                (i.id, path)
            })
            .collect());
    }
    if !gt.is_dir() {
        return Err(EvalError::MissingGroundTruth(gt.to_path_buf()).into());
    }
    Ok(subdirs_with(gt, GT_FILE)?.into_iter().map(|id| (id.clone(), gt.join(&id).join(GT_FILE))).collect())
}
