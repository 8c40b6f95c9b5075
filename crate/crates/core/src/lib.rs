//! Article segmentation for labelled newspaper page images.
//!
//! The pipeline turns per-pixel logical label maps into an ordered list of
//! articles: components are smoothed by majority vote, text lines are
//! extracted and split, separators are gridded into boxes, boxes are
//! arranged in a section tree whose traversal gives the reading order, and
//! articles are assembled and linked across pages.

pub mod articles;
pub mod config;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod grid;
pub mod labels;
pub mod metsalto;
pub mod overlay;
pub mod pipeline;
pub mod pixels;
pub mod smoothing;
pub mod synth;
pub mod textlines;

pub use config::PipelineConfig;
pub use error::{ConfigError, EvalError, LabelMapError, MetsError, OverlayError, SynthError};
pub use geometry::{Orientation, Rect, Span};
pub use labels::{InformativeLabel, LabelImage, RawLabel};
pub use pixels::{PixelSet, Run};
pub use pipeline::{segment_issue, IssueResult, PageResult};
