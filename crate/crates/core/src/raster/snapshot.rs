use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BandTriplet, MultispectralStack, RasterError, TileSpec};
use crate::stats::quantile_sorted;

/// Reflectance-to-8-bit mapping applied independently to each output channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StretchPolicy {
    /// Linear stretch between the `low` and `high` percentiles (0-100),
    /// clipped to `[0, 255]`.
    Percentile { low: f64, high: f64 },
    /// Linear stretch between the channel minimum and maximum.
    MinMax,
}

impl Default for StretchPolicy {
    fn default() -> Self {
        StretchPolicy::Percentile {
            low: 2.0,
            high: 98.0,
        }
    }
}

/// Gray level used when a channel is constant and the stretch is undefined.
const DEGENERATE_LEVEL: u8 = 128;

/// An `H x W x 3` 8-bit image, interleaved RGB, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbSnapshot {
    pub pixels: Vec<u8>,
    pub height: usize,
    pub width: usize,
    pub source_timestep: usize,
    pub tile_id: String,
}

impl RgbSnapshot {
    pub fn new(
        tile_id: impl Into<String>,
        height: usize,
        width: usize,
        pixels: Vec<u8>,
        source_timestep: usize,
    ) -> Result<Self, RasterError> {
        if pixels.len() != height * width * 3 {
            return Err(RasterError::InvalidStack(format!(
                "snapshot holds {} bytes, expected {}",
                pixels.len(),
                height * width * 3
            )));
        }
        Ok(Self {
            pixels,
            height,
            width,
            source_timestep,
            tile_id: tile_id.into(),
        })
    }

    #[inline]
    pub fn rgb(&self, row: usize, col: usize) -> [u8; 3] {
        let i = (row * self.width + col) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    /// Cuts the window described by `spec`; the result carries `tile_id`.
    pub fn crop(&self, spec: &TileSpec, tile_id: impl Into<String>) -> Result<Self, RasterError> {
        if spec.origin_row + spec.side > self.height || spec.origin_col + spec.side > self.width {
            return Err(RasterError::TilingParam(format!(
                "window {}+{} x {}+{} exceeds {}x{}",
                spec.origin_row, spec.side, spec.origin_col, spec.side, self.height, self.width
            )));
        }
        let mut pixels = Vec::with_capacity(spec.side * spec.side * 3);
        for row in spec.origin_row..spec.origin_row + spec.side {
            let start = (row * self.width + spec.origin_col) * 3;
            pixels.extend_from_slice(&self.pixels[start..start + spec.side * 3]);
        }
        Self::new(tile_id, spec.side, spec.side, pixels, self.source_timestep)
    }

    pub fn write_png(&self, path: &Path) -> Result<(), RasterError> {
        image::save_buffer(
            path,
            &self.pixels,
            self.width as u32,
            self.height as u32,
            image::ColorType::Rgb8,
        )
        .map_err(|source| RasterError::Image {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Loads an 8-bit PNG as RGB. The source timestep is unknown and set to 0.
    pub fn read_png(path: &Path) -> Result<Self, RasterError> {
        let img = image::open(path).map_err(|source| RasterError::Image {
            path: path.to_path_buf(),
            source,
        })?;
        let rgb = img.to_rgb8();
        let (w, h) = rgb.dimensions();
        let tile_id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::new(tile_id, h as usize, w as usize, rgb.into_raw(), 0)
    }
}

fn stretch_bounds(values: &mut [f64], stretch: StretchPolicy) -> (f64, f64) {
    match stretch {
        StretchPolicy::MinMax => values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(*v), hi.max(*v))
            }),
        StretchPolicy::Percentile { low, high } => {
            values.sort_by(|a, b| a.total_cmp(b));
            (
                quantile_sorted(values, low / 100.0).unwrap_or(0.0),
                quantile_sorted(values, high / 100.0).unwrap_or(0.0),
            )
        }
    }
}

/// Selects the three bands at timestep `t` and maps them to 8 bits.
pub fn extract_rgb_snapshot(
    stack: &MultispectralStack,
    t: usize,
    bands: BandTriplet,
    stretch: StretchPolicy,
) -> Result<RgbSnapshot, RasterError> {
    if t >= stack.timesteps() {
        return Err(RasterError::TimestepOutOfRange {
            t,
            timesteps: stack.timesteps(),
        });
    }
    let channels = stack.channels();
    let bands = BandTriplet::new(
        bands.red_index,
        bands.green_index,
        bands.blue_index,
        channels,
    )?;
    if let StretchPolicy::Percentile { low, high } = stretch {
        if !(0.0..=100.0).contains(&low) || !(0.0..=100.0).contains(&high) || low >= high {
            return Err(RasterError::BandConfig(format!(
                "percentile stretch needs 0 <= low < high <= 100, got {low}..{high}"
            )));
        }
    }
    let frame = stack.timestep(t);
    let pixels = stack.height() * stack.width();
    let mut out = vec![0u8; pixels * 3];
    for (slot, band) in bands.as_array().into_iter().enumerate() {
        let raw: Vec<f64> = frame
            .chunks_exact(channels)
            .map(|px| px[band] as f64)
            .collect();
        let mut scratch = raw.clone();
        let (lo, hi) = stretch_bounds(&mut scratch, stretch);
        for (i, v) in raw.iter().enumerate() {
            out[i * 3 + slot] = if hi > lo {
                (((v - lo) / (hi - lo)).clamp(0.0, 1.0) * 255.0).round() as u8
            } else {
                DEGENERATE_LEVEL
            };
        }
    }
    RgbSnapshot::new(stack.tile_id(), stack.height(), stack.width(), out, t)
}
