//! Command-line front end of the newsseg segmenter.
//!
//! Exit codes: 0 on success, 1 when some input failed, 2 on an invalid
//! invocation (bad flags, unreadable configuration, unknown stage).

pub mod corpus;
pub mod evaluate;
pub mod fsutil;
pub mod inputs;
pub mod overlay;
pub mod segment;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use newsseg_core::overlay::OverlayStage;
use newsseg_core::synth::LayoutFamily;
use newsseg_core::PipelineConfig;

pub use corpus::{write_corpus, Manifest, ManifestIssue};
pub use evaluate::{cmd_eval, CorpusReport};
pub use overlay::cmd_overlay;
pub use segment::{cmd_segment, RunSummary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "newsseg", version, about = "Article segmentation of newspaper label maps")]
pub struct Cli {
    /// Pipeline configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads; overrides the configuration.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    pub print_config: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment label maps into METS/ALTO.
    Segment {
        /// Label-map files, issue directories, or corpus directories.
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a pipeline stage of one page to PNG.
    Overlay {
        input: PathBuf,
        /// labels, smoothed, lines, grid, articles or order.
        #[arg(long)]
        stage: String,
        /// 1-based page of the issue.
        #[arg(long, default_value_t = 1)]
        page: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic corpus with ground truth.
    Synth {
        /// Layout family (TOML); defaults apply when omitted.
        #[arg(long)]
        recipe: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score predicted articles against ground truth.
    Eval {
        predicted: PathBuf,
        ground_truth: PathBuf,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

/// Failure caused by the invocation rather than the data.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(e: impl std::fmt::Display) -> anyhow::Error {
    UsageError(format!("{e:#}")).into()
}

pub fn load_config(path: Option<&PathBuf>, workers: Option<usize>) -> Result<PipelineConfig> {
    let mut cfg = match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| usage(format!("reading {}: {e}", p.display())))?;
            PipelineConfig::from_toml(&text).map_err(|e| usage(format!("{}: {e}", p.display())))?
        }
        None => PipelineConfig::default(),
    };
    if let Some(w) = workers {
        cfg.workers = w;
        cfg.validate().map_err(usage)?;
    }
    Ok(cfg)
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                EXIT_USAGE
            } else {
                EXIT_FAILURE
            }
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let cfg = load_config(cli.config.as_ref(), cli.workers)?;
    if cli.print_config {
        if cli.config.is_some() || cli.workers.is_some() {
            print!("{}", cfg.to_toml());
        } else {
            print!("{}", PipelineConfig::template());
        }
        return Ok(EXIT_OK);
    }
    let Some(command) = cli.command else {
        return Err(usage("no command given; see --help"));
    };
    match command {
        Command::Segment { inputs: paths, out } => {
            if paths.is_empty() {
                return Err(usage("segment needs at least one input"));
            }
            let issues = inputs::resolve_inputs(&paths).map_err(usage)?;
            let out = out.unwrap_or_else(|| cfg.output_dir.clone());
            let summary = cmd_segment(&issues, &cfg, &out)?;
            eprintln!(
                "{} issue(s) written, {} failed, {} page error(s); log in {}",
                summary.issues_written.len(),
                summary.issues_failed.len(),
                summary.page_errors,
                out.join(segment::RUN_LOG).display()
            );
            Ok(if summary.success() { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Overlay { input, stage, page, out } => {
            let stage: OverlayStage = stage.parse().map_err(usage)?;
            cmd_overlay(&input, stage, page, &cfg, &out)?;
            Ok(EXIT_OK)
        }
        Command::Synth { recipe, seed, count, out } => {
            let family = match recipe {
                Some(p) => corpus::load_recipe(&p).map_err(usage)?,
                None => LayoutFamily::default(),
            };
            let m = write_corpus(&family, seed, count, &out)?;
            eprintln!("{} issue(s), {} page(s), {} article(s) in {}", m.issues.len(), m.total_pages, m.total_articles, out.display());
            Ok(EXIT_OK)
        }
        Command::Eval { predicted, ground_truth, json } => {
            let report = cmd_eval(&predicted, &ground_truth, cfg.iou_threshold)?;
            print!("{}", report.to_table());
            if let Some(path) = json {
                fsutil::write_json(&path, &report).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(EXIT_OK)
        }
    }
}
