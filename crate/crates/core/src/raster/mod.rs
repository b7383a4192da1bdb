//! Multispectral stack ingest, NDVI, snapshot extraction, cloud screening,
//! sub-tiling and seeded sample selection.

mod ndvi;
mod sample;
mod screen;
mod snapshot;
mod stack;
mod tiling;

pub use ndvi::{compute_ndvi, ndvi_pixel, select_max_ndvi_timestep, NdviSeries};
pub use sample::sample_select;
pub use screen::{read_exclusion_list, screen_clouds, ScreenPolicy, ScreenResult};
pub use snapshot::{extract_rgb_snapshot, RgbSnapshot, StretchPolicy};
pub use stack::{BandTriplet, MultispectralStack, MSST_MAGIC, MSST_VERSION};
pub use tiling::{tile_image, TileSpec};

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum RasterError {
    #[error("invalid stack: {0}")]
    InvalidStack(String),
    #[error("band index {index} out of range for {channels} channels")]
    BandOutOfRange { index: usize, channels: usize },
    #[error("band configuration: {0}")]
    BandConfig(String),
    #[error("timestep {t} out of range for {timesteps} timesteps")]
    TimestepOutOfRange { t: usize, timesteps: usize },
    #[error("unusable tile: no timestep has a valid NDVI mean")]
    UnusableTile,
    #[error("tile side is zero (parent side {parent_side}, factor {factor})")]
    ZeroSide { parent_side: usize, factor: usize },
    #[error("invalid tiling parameter: {0}")]
    TilingParam(String),
    #[error("cannot select {requested} items from {available}")]
    SampleTooLarge { requested: usize, available: usize },
    #[error("malformed stack file {path}: {reason}")]
    Format { path: PathBuf, reason: String },
    #[error("image error for {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("io error for {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
