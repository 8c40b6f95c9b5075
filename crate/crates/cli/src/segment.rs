//! The `segment` command: label maps in, METS/ALTO out.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use newsseg_core::eval::ArticleSet;
use newsseg_core::metsalto::{alto_path, emit_alto, emit_mets};
use newsseg_core::pipeline::{analyze_page, finish_page, issue_stats, link_issue, PageWarning, StageTimings};
use newsseg_core::{IssueResult, LabelImage, PipelineConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::fsutil::{write_atomic, write_json};
use crate::inputs::{load_page, IssueInput};

pub const RUN_LOG: &str = "run.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PageStatus {
    Ok,
    Error,
    /// Loaded, but another page of the issue failed.
    Skipped,
}

/// One line of the run log.
#[derive(Debug, Clone, Serialize)]
pub struct PageRecord {
    pub issue: String,
    pub page: usize,
    pub input: String,
    pub status: PageStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub lines: usize,
    pub boxes: usize,
    pub articles: usize,
    pub warnings: Vec<PageWarning>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<StageTimings>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub issues_written: Vec<String>,
    pub issues_failed: Vec<String>,
    pub page_errors: usize,
}

impl RunSummary {
    pub fn success(&self) -> bool {
        self.issues_failed.is_empty() && self.page_errors == 0
    }
}

pub fn build_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("starting worker pool")
}

/// Segments every issue, writing `{out}/{issue}/mets.xml`,
/// `{out}/{issue}/alto/pNNNN.xml`, optionally `articles.json`, and the
/// run log. A page that fails to load fails its issue; the run goes on.
pub fn cmd_segment(issues: &[IssueInput], cfg: &PipelineConfig, out: &Path) -> Result<RunSummary> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let pool = build_pool(cfg.workers)?;
    let mut summary = RunSummary::default();
    let mut log = String::new();
    for issue in issues {
        let loaded: Vec<Result<LabelImage>> =
            pool.install(|| issue.pages.par_iter().map(|p| load_page(p, cfg.input_format)).collect());
        let failed = loaded.iter().any(|r| r.is_err());
        let mut records: Vec<PageRecord> = issue
            .pages
            .iter()
            .zip(&loaded)
            .enumerate()
            .map(|(i, (path, r))| PageRecord {
                issue: issue.id.clone(),
                page: i + 1,
                input: path.display().to_string(),
                status: match (r, failed) {
                    (Err(_), _) => PageStatus::Error,
                    (Ok(_), true) => PageStatus::Skipped,
                    (Ok(_), false) => PageStatus::Ok,
                },
                error: r.as_ref().err().map(|e| format!("{e:#}")),
                lines: 0,
                boxes: 0,
                articles: 0,
                warnings: Vec::new(),
                timings: None,
            })
            .collect();
        summary.page_errors += records.iter().filter(|r| r.status == PageStatus::Error).count();
        if failed {
            summary.issues_failed.push(issue.id.clone());
        } else {
            let images: Vec<LabelImage> = loaded.into_iter().map(|r| r.expect("checked above")).collect();
            let result = pool.install(|| segment_parallel(&images, cfg));
            write_issue(&result, issue, cfg, &out.join(&issue.id))?;
            for (rec, page) in records.iter_mut().zip(&result.pages) {
                rec.lines = page.lines.len();
                rec.boxes = page.boxes.len();
                rec.articles = page.articles.len();
                rec.warnings = page.warnings.clone();
                rec.timings = Some(page.timings.clone());
            }
            summary.issues_written.push(issue.id.clone());
        }
        for rec in &records {
            log.push_str(&serde_json::to_string(rec)?);
            log.push('\n');
        }
    }
    write_atomic(&out.join(RUN_LOG), log.as_bytes())?;
    Ok(summary)
}

/// [`newsseg_core::segment_issue`] with the per-page stages spread over the
/// current rayon pool.
pub fn segment_parallel(images: &[LabelImage], cfg: &PipelineConfig) -> IssueResult {
    let analyses: Vec<_> = images.par_iter().map(|img| analyze_page(img, cfg)).collect();
    let stats = issue_stats(&analyses, cfg);
    let pages = analyses
        .into_par_iter()
        .enumerate()
        .map(|(i, a)| finish_page(i, a, &stats, cfg))
        .collect();
    link_issue(stats, pages)
}

fn image_ref(path: &Path) -> String {
    path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned())
}

pub fn write_issue(result: &IssueResult, issue: &IssueInput, cfg: &PipelineConfig, dir: &Path) -> Result<()> {
    let refs: Vec<String> = issue.pages.iter().map(|p| image_ref(p)).collect();
    let doc = result.document(&issue.id, issue.date.clone(), &refs);
    for (i, page) in doc.pages.iter().enumerate() {
        write_atomic(&dir.join(alto_path(i)), emit_alto(i, page).as_bytes())?;
    }
    let mets = emit_mets(&doc).with_context(|| format!("issue {}", issue.id))?;
    write_atomic(&dir.join("mets.xml"), mets.as_bytes())?;
    if cfg.write_articles_json {
        write_json(&dir.join("articles.json"), &ArticleSet { articles: result.article_records() })?;
    }
    Ok(())
}

pub fn issue_dir(out: &Path, issue: &str) -> PathBuf {
    out.join(issue)
}
