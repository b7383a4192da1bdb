use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{HarnessError, DEFAULT_COLOR_TOLERANCE};
use crate::raster::{ScreenPolicy, StretchPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmenterKind {
    /// Read interchange files from `masks/` under the data root.
    External,
    /// Model-free flood-fill segmenter on the RGB snapshot.
    ColorOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StridePolicy {
    /// stride = side
    NonOverlapping,
    /// stride = side / 2
    HalfOverlap,
    Pixels(usize),
}

impl StridePolicy {
    pub fn stride(&self, side: usize) -> usize {
        match *self {
            StridePolicy::NonOverlapping => side,
            StridePolicy::HalfOverlap => (side / 2).max(1),
            StridePolicy::Pixels(p) => p,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BandNames {
    pub red: String,
    pub green: String,
    pub blue: String,
    pub nir: String,
}

impl Default for BandNames {
    fn default() -> Self {
        Self {
            red: "B4".into(),
            green: "B3".into(),
            blue: "B2".into(),
            nir: "B8".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub aoi_factors: Vec<usize>,
    pub pps_percents: Vec<f64>,
    pub mmra_percents: Vec<f64>,
    pub samples_per_set: usize,
    pub seed: u64,
    pub stride: StridePolicy,
    /// Drop pixels whose predicted label is 0 before scoring.
    pub exclude_background: bool,
    pub segmenter: SegmenterKind,
    pub color_tolerance: u8,
    pub tails_k: usize,
    pub bands: BandNames,
    pub stretch: StretchPolicy,
    pub screen: ScreenPolicy,
    /// Newline-delimited tile ids to drop; relative paths resolve against the
    /// data root.
    pub exclusion_list: Option<PathBuf>,
    /// Abort on the first failed sample instead of recording it.
    pub strict: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            aoi_factors: vec![1, 2, 4, 8],
            pps_percents: vec![0.01, 0.02, 0.04, 0.08],
            mmra_percents: vec![0.0, 0.001, 0.005, 0.01],
            samples_per_set: 300,
            seed: 42,
            stride: StridePolicy::NonOverlapping,
            exclude_background: false,
            segmenter: SegmenterKind::External,
            color_tolerance: DEFAULT_COLOR_TOLERANCE,
            tails_k: 5,
            bands: BandNames::default(),
            stretch: StretchPolicy::default(),
            screen: ScreenPolicy::default(),
            exclusion_list: None,
            strict: false,
        }
    }
}

impl ExperimentConfig {
    /// Loads TOML or JSON, chosen by file extension (`.json` is JSON,
    /// anything else TOML).
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let cfg: Self = if is_json {
            serde_json::from_str(&text)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let err = |m: String| Err(HarnessError::Config(m));
        if self.aoi_factors.is_empty()
            || self.pps_percents.is_empty()
            || self.mmra_percents.is_empty()
        {
            return err("aoi_factors, pps_percents and mmra_percents must be non-empty".into());
        }
        if let Some(f) = self.aoi_factors.iter().find(|&&f| f == 0) {
            return err(format!("aoi factor {f} must be >= 1"));
        }
        if let Some(p) = self
            .pps_percents
            .iter()
            .find(|p| !(**p > 0.0 && **p <= 1.0))
        {
            return err(format!("pps fraction {p} outside (0, 1]"));
        }
        if let Some(m) = self
            .mmra_percents
            .iter()
            .find(|m| !(**m >= 0.0 && **m <= 1.0))
        {
            return err(format!("mmra fraction {m} outside [0, 1]"));
        }
        if self.samples_per_set == 0 {
            return err("samples_per_set must be >= 1".into());
        }
        if let StridePolicy::Pixels(0) = self.stride {
            return err("stride must be >= 1 pixel".into());
        }
        if !(0.0..=1.0).contains(&self.screen.fraction_threshold) {
            return err(format!(
                "screen.fraction_threshold {} outside [0, 1]",
                self.screen.fraction_threshold
            ));
        }
        Ok(())
    }
}
