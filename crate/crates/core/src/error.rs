use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabelMapError {
    #[error("malformed label map header: {0}")]
    MalformedHeader(String),
    #[error("invalid label code {value} at ({x}, {y})")]
    InvalidLabelCode { x: u32, y: u32, value: u32 },
    #[error("truncated label data: expected {expected} pixels, found {got}")]
    TruncatedData { expected: usize, got: usize },
    #[error("palette sidecar: {0}")]
    Palette(String),
    #[error("png encoding: {0}")]
    Png(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthError {
    #[error("infeasible recipe: {0}")]
    InfeasibleRecipe(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetsError {
    #[error("logical structure references missing physical element {0}")]
    DanglingReference(String),
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("ground truth has no articles; rates are undefined")]
    DivisionByZero,
    #[error("missing ground truth for {}", .0.display())]
    MissingGroundTruth(PathBuf),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config value out of range: {0}")]
    OutOfRange(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OverlayError {
    #[error("unknown overlay stage {0:?}; expected one of labels, smoothed, lines, grid, articles, order")]
    UnknownStage(String),
}
