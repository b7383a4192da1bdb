//! Class-agnostic mask sets and their reduction to a single label map.

mod consolidate;
mod interchange;
mod label_map;
mod mmra;
mod prompt;
mod rle;

pub use consolidate::{consolidate, priority_order};
pub use interchange::{
    parse_maskset, read_maskset, write_maskset, write_maskset_file, MASKSET_VERSION,
};
pub use label_map::{LabelMap, LMAP_MAGIC, LMAP_VERSION};
pub use mmra::filter_mmra;
pub use prompt::{prompt_grid, prompt_grid_rect, PromptConfig};
pub use rle::{decode_rle, encode_rle, BooleanMask};

use std::path::PathBuf;

/// Ordered masks produced by one segmenter run over one image.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskSet {
    pub image_id: String,
    pub height: usize,
    pub width: usize,
    pub generator: PromptConfig,
    pub masks: Vec<BooleanMask>,
}

impl MaskSet {
    pub fn new(
        image_id: impl Into<String>,
        height: usize,
        width: usize,
        generator: PromptConfig,
        masks: Vec<BooleanMask>,
    ) -> Result<Self, MaskError> {
        for (index, m) in masks.iter().enumerate() {
            if m.height() != height || m.width() != width {
                return Err(MaskError::DimensionMismatch {
                    index,
                    expected: (height, width),
                    found: (m.height(), m.width()),
                });
            }
        }
        Ok(Self {
            image_id: image_id.into(),
            height,
            width,
            generator,
            masks,
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum MaskError {
    #[error("run lengths sum to {found}, expected {expected}")]
    RunSum { expected: u64, found: u64 },
    #[error("mask {index}: {reason}")]
    InvalidMask { index: usize, reason: String },
    #[error("mask {index} is {found:?} (h, w) but the set is {expected:?}")]
    DimensionMismatch {
        index: usize,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("label map dimensions differ: {left:?} vs {right:?}")]
    LabelMapMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("invalid mask set: {0}")]
    Schema(String),
    #[error("malformed label map {path}: {reason}")]
    LabelFormat { path: PathBuf, reason: String },
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
