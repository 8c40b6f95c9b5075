//! The `overlay` command.

use std::path::Path;

use anyhow::{bail, Result};
use newsseg_core::overlay::{render, OverlayStage};
use newsseg_core::PipelineConfig;

use crate::fsutil::write_atomic;
use crate::inputs::{load_page, resolve_inputs};
use crate::segment::{build_pool, segment_parallel};

/// Renders `stage` for page `page` (1-based) of the issue at `input`.
pub fn cmd_overlay(input: &Path, stage: OverlayStage, page: usize, cfg: &PipelineConfig, out: &Path) -> Result<()> {
    let issues = resolve_inputs(std::slice::from_ref(&input.to_path_buf()))?;
    let Some(issue) = issues.first() else { bail!("{} holds no issue", input.display()) };
    if page == 0 || page > issue.pages.len() {
        bail!("page {page} out of range 1..={}", issue.pages.len());
    }
    let images = issue.pages.iter().map(|p| load_page(p, cfg.input_format)).collect::<Result<Vec<_>>>()?;
    let pool = build_pool(cfg.workers)?;
    let result = pool.install(|| segment_parallel(&images, cfg));
    let rgb = render(stage, &images[page - 1], &result, page - 1);
    let mut bytes = Vec::new();
    rgb.write_png(&mut bytes)?;
    write_atomic(out, &bytes)
}
