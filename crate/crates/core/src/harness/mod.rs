//! Experiment orchestration: sweeps over sub-tile size, prompt density and
//! minimum region area; per-sample scoring; aggregation; tails; reports.
//!
//! A data root is laid out as:
//!
//! ```text
//! labels/<tile>.lmap | labels/<tile>.png   ground truth; defines the tile list
//! stacks/<tile>.msst                       multispectral stack (preferred)
//! snapshots/<tile>.png                     RGB snapshot, used when no stack
//! masks/<sub-tile>/pps<P>_mmra<M>.json     external mask sets
//! ```

mod config;
mod experiment;
mod oracle_segmenter;
mod report;
pub mod synthetic;

pub use config::{BandNames, ExperimentConfig, SegmenterKind, StridePolicy};
pub use experiment::{
    external_mask_path, load_tile_snapshot, run_experiment, SampleResult, SampleStatus, SkippedTile,
};
pub use oracle_segmenter::{color_oracle_segmenter, DEFAULT_COLOR_TOLERANCE};
pub use report::{
    aggregate_rows, emit_report, extract_tails, read_samples_csv, Aggregate, ConsensusReport,
    MetricSummary, ReportFormat, TailEntry, Tails, QUANTILES,
};

use std::path::PathBuf;

use crate::mask::MaskError;
use crate::metrics::MetricsError;
use crate::raster::RasterError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error in {path}: {reason}")]
    Data { path: PathBuf, reason: String },
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error(transparent)]
    Mask(#[from] MaskError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("io error for {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error for {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl HarnessError {
    /// Process exit code: 2 for configuration errors, 3 for data errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Raster(
                RasterError::BandConfig(_)
                | RasterError::BandOutOfRange { .. }
                | RasterError::TilingParam(_)
                | RasterError::ZeroSide { .. },
            ) => 2,
            _ => 3,
        }
    }
}
