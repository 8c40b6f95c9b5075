//! Pipeline configuration, read from TOML.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::eval::DEFAULT_IOU_THRESHOLD;
use crate::smoothing::{Connectivity, LabelPriority};
use crate::textlines::SplitParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TolerancePolicy {
    /// `value` times an issue statistic.
    Relative,
    /// `value` pixels.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerance {
    pub policy: TolerancePolicy,
    pub value: f64,
}

impl Tolerance {
    pub fn relative(value: f64) -> Self {
        Tolerance { policy: TolerancePolicy::Relative, value }
    }

    pub fn fixed(value: f64) -> Self {
        Tolerance { policy: TolerancePolicy::Fixed, value }
    }

    /// Resolves the tolerance against the issue statistic it scales.
    pub fn resolve(&self, statistic: f64) -> f64 {
        match self.policy {
            TolerancePolicy::Relative => self.value * statistic,
            TolerancePolicy::Fixed => self.value,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    /// Chosen by file extension.
    #[default]
    Auto,
    Pgm,
    Png,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub connectivity: Connectivity,
    /// Tie-break order of the majority vote, strongest first.
    pub tie_break: LabelPriority,
    pub split: SplitParams,
    /// Separator components thicker than this are treated as noise.
    pub max_separator_thickness: i32,
    /// Gap allowed between collinear separator pieces; relative to the
    /// median text-line height.
    pub gap_tolerance: Tolerance,
    /// Cross-axis offset allowed between collinear pieces; relative to the
    /// median separator thickness.
    pub offset_tolerance: Tolerance,
    pub iou_threshold: f64,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
    pub output_dir: PathBuf,
    pub input_format: InputFormat,
    /// Also write `articles.json` next to the METS file.
    pub write_articles_json: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            connectivity: Connectivity::Eight,
            tie_break: LabelPriority::default(),
            split: SplitParams::default(),
            max_separator_thickness: 12,
            gap_tolerance: Tolerance::relative(0.33),
            offset_tolerance: Tolerance::relative(0.5),
            iou_threshold: DEFAULT_IOU_THRESHOLD,
            workers: 0,
            output_dir: PathBuf::from("out"),
            input_format: InputFormat::Auto,
            write_articles_json: true,
        }
    }
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::OutOfRange(what()))
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Commented default configuration.
    pub fn template() -> String {
        let body = PipelineConfig::default().to_toml();
        format!(
            "# newsseg pipeline configuration\n\
             # connectivity: \"four\" | \"eight\"\n\
             # tie_break: the five non-background labels, strongest first\n\
             # split.factor: > 1; split.valley_ratio: (0, 1); split.max_rounds: 1..=10\n\
             # max_separator_thickness: 1..=200 px\n\
             # gap_tolerance / offset_tolerance: policy \"relative\" | \"fixed\", value >= 0\n\
             # iou_threshold: (0, 1]\n\
             # workers: 0 = all cores\n\
             # input_format: \"auto\" | \"pgm\" | \"png\"\n\n{body}"
        )
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.split;
        check(s.factor > 1.0 && s.factor.is_finite(), || format!("split.factor = {} must exceed 1", s.factor))?;
        check(s.valley_ratio > 0.0 && s.valley_ratio < 1.0, || {
            format!("split.valley_ratio = {} must lie in (0, 1)", s.valley_ratio)
        })?;
        check((1..=10).contains(&s.max_rounds), || format!("split.max_rounds = {} must lie in 1..=10", s.max_rounds))?;
        check((1..=200).contains(&self.max_separator_thickness), || {
            format!("max_separator_thickness = {} must lie in 1..=200", self.max_separator_thickness)
        })?;
        for (name, t) in [("gap_tolerance", self.gap_tolerance), ("offset_tolerance", self.offset_tolerance)] {
            check(t.value >= 0.0 && t.value.is_finite(), || format!("{name}.value = {} must be >= 0", t.value))?;
        }
        check(self.iou_threshold > 0.0 && self.iou_threshold <= 1.0, || {
            format!("iou_threshold = {} must lie in (0, 1]", self.iou_threshold)
        })?;
        check(self.workers <= 1024, || format!("workers = {} exceeds 1024", self.workers))?;
        Ok(())
    }
}
