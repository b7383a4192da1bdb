//! JSON interchange format for mask sets:
//!
//! ```json
//! {"version":1,"image_id":"t","height":2,"width":2,
//!  "generator":{"pps":1,"mmra":0,"pps_percent":0.5,"mmra_percent":0.0},
//!  "masks":[{"predicted_iou":0.9,"area":2,"rle":[1,2,1]}]}
//! ```
//!
//! RLE runs are row-major and begin with a background run. Writing emits the
//! fields in exactly the order above with no whitespace and a trailing newline.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BooleanMask, MaskError, MaskSet, PromptConfig};

pub const MASKSET_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaskSetDoc {
    version: u32,
    image_id: String,
    height: usize,
    width: usize,
    generator: PromptConfig,
    masks: Vec<MaskDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaskDoc {
    predicted_iou: f64,
    area: u64,
    rle: Vec<u32>,
}

pub fn parse_maskset(text: &str) -> Result<MaskSet, MaskError> {
    let doc: MaskSetDoc =
        serde_json::from_str(text).map_err(|e| MaskError::Schema(e.to_string()))?;
    if doc.version != MASKSET_VERSION {
        return Err(MaskError::Schema(format!(
            "unsupported version {} (expected {MASKSET_VERSION})",
            doc.version
        )));
    }
    if doc.height == 0 || doc.width == 0 {
        return Err(MaskError::Schema(format!(
            "image dimensions must be positive, got {}x{}",
            doc.height, doc.width
        )));
    }
    let mut masks = Vec::with_capacity(doc.masks.len());
    for (index, m) in doc.masks.into_iter().enumerate() {
        if !m.predicted_iou.is_finite() {
            return Err(MaskError::InvalidMask {
                index,
                reason: "predicted_iou is not finite".into(),
            });
        }
        let mask =
            BooleanMask::from_rle(doc.height, doc.width, m.rle, m.predicted_iou).map_err(|e| {
                MaskError::InvalidMask {
                    index,
                    reason: e.to_string(),
                }
            })?;
        if mask.area() != m.area {
            return Err(MaskError::InvalidMask {
                index,
                reason: format!("area is {} but the runs cover {}", m.area, mask.area()),
            });
        }
        masks.push(mask);
    }
    MaskSet::new(doc.image_id, doc.height, doc.width, doc.generator, masks)
}

pub fn write_maskset(set: &MaskSet) -> String {
    let doc = MaskSetDoc {
        version: MASKSET_VERSION,
        image_id: set.image_id.clone(),
        height: set.height,
        width: set.width,
        generator: set.generator,
        masks: set
            .masks
            .iter()
            .map(|m| MaskDoc {
                predicted_iou: m.predicted_iou(),
                area: m.area(),
                rle: m.rle().to_vec(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string(&doc).expect("mask set serialises");
    out.push('\n');
    out
}

pub fn read_maskset(path: &Path) -> Result<MaskSet, MaskError> {
    let text = std::fs::read_to_string(path).map_err(|source| MaskError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_maskset(&text)
}

/// Writes the canonical document, creating parent directories as needed.
pub fn write_maskset_file(set: &MaskSet, path: &Path) -> Result<(), MaskError> {
    let io = |source| MaskError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    std::fs::write(path, write_maskset(set)).map_err(io)
}
