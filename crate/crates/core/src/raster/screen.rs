use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{RasterError, RgbSnapshot};

/// Brightness-fraction cloud heuristic plus a manual exclusion list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScreenPolicy {
    /// A pixel is "bright" when `min(R, G, B)` exceeds this level.
    pub brightness_threshold: u8,
    /// The tile is unusable when the bright fraction exceeds this.
    pub fraction_threshold: f64,
    pub exclusions: BTreeSet<String>,
}

impl Default for ScreenPolicy {
    fn default() -> Self {
        Self {
            brightness_threshold: 200,
            fraction_threshold: 0.05,
            exclusions: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreenResult {
    pub usable: bool,
    /// Fraction of bright pixels.
    pub score: f64,
    pub excluded: bool,
}

pub fn screen_clouds(snapshot: &RgbSnapshot, policy: &ScreenPolicy) -> ScreenResult {
    let total = snapshot.height * snapshot.width;
    let bright = snapshot
        .pixels
        .chunks_exact(3)
        .filter(|px| {
            px.iter()
                .min()
                .is_some_and(|m| *m > policy.brightness_threshold)
        })
        .count();
    let score = if total == 0 {
        0.0
    } else {
        bright as f64 / total as f64
    };
    let excluded = policy.exclusions.contains(&snapshot.tile_id);
    ScreenResult {
        usable: !excluded && score <= policy.fraction_threshold,
        score,
        excluded,
    }
}

/// One tile id per line; blank lines and lines starting with `#` are ignored.
pub fn read_exclusion_list(path: &Path) -> Result<BTreeSet<String>, RasterError> {
    let text = std::fs::read_to_string(path).map_err(|source| RasterError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}
