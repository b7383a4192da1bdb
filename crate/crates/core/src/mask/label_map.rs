use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use super::MaskError;
use crate::raster::TileSpec;

pub const LMAP_MAGIC: &[u8; 4] = b"LMAP";
pub const LMAP_VERSION: u32 = 1;

/// Row-major raster of non-negative integer labels. Label 0 is reserved for
/// background / unassigned pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    pub height: usize,
    pub width: usize,
    pub labels: Vec<u32>,
    pub legend: Option<BTreeMap<u32, String>>,
}

impl LabelMap {
    pub fn new(height: usize, width: usize, labels: Vec<u32>) -> Result<Self, MaskError> {
        if labels.len() != height * width {
            return Err(MaskError::Schema(format!(
                "label map holds {} labels, expected {}",
                labels.len(),
                height * width
            )));
        }
        Ok(Self {
            height,
            width,
            labels,
            legend: None,
        })
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            labels: vec![0; height * width],
            legend: None,
        }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.labels[row * self.width + col]
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn crop(&self, spec: &TileSpec) -> Result<Self, MaskError> {
        if spec.origin_row + spec.side > self.height || spec.origin_col + spec.side > self.width {
            return Err(MaskError::Schema(format!(
                "window at ({}, {}) side {} exceeds label map {}x{}",
                spec.origin_row, spec.origin_col, spec.side, self.height, self.width
            )));
        }
        let mut labels = Vec::with_capacity(spec.side * spec.side);
        for row in spec.origin_row..spec.origin_row + spec.side {
            let start = row * self.width + spec.origin_col;
            labels.extend_from_slice(&self.labels[start..start + spec.side]);
        }
        Ok(Self {
            height: spec.side,
            width: spec.side,
            labels,
            legend: self.legend.clone(),
        })
    }

    /// Binary layout: `"LMAP"`, then version, height, width as u32 LE, then
    /// `height * width` u32 LE labels in row-major order.
    pub fn encode_lmap(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + self.labels.len() * 4);
        out.extend_from_slice(LMAP_MAGIC);
        for v in [LMAP_VERSION, self.height as u32, self.width as u32] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for l in &self.labels {
            out.extend_from_slice(&l.to_le_bytes());
        }
        out
    }

    pub fn decode_lmap(bytes: &[u8]) -> Result<Self, String> {
        if bytes.len() < 16 {
            return Err("truncated header".into());
        }
        if &bytes[..4] != LMAP_MAGIC {
            return Err(format!("bad magic {:?}", &bytes[..4]));
        }
        let word =
            |i: usize| u32::from_le_bytes([bytes[i], bytes[i + 1], bytes[i + 2], bytes[i + 3]]);
        let version = word(4);
        if version != LMAP_VERSION {
            return Err(format!("unsupported version {version}"));
        }
        let (height, width) = (word(8) as usize, word(12) as usize);
        let body = &bytes[16..];
        if body.len() != height * width * 4 {
            return Err(format!(
                "body holds {} bytes, expected {}",
                body.len(),
                height * width * 4
            ));
        }
        let labels = body
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        Ok(Self {
            height,
            width,
            labels,
            legend: None,
        })
    }

    /// Reads `.lmap` files or 8/16-bit grayscale PNGs (by extension).
    pub fn read(path: &Path) -> Result<Self, MaskError> {
        let is_png = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if is_png {
            let img = image::open(path).map_err(|source| MaskError::Image {
                path: path.to_path_buf(),
                source,
            })?;
            let gray = img.to_luma16();
            let (w, h) = gray.dimensions();
            let labels = match img {
                image::DynamicImage::ImageLuma8(ref g) => {
                    g.as_raw().iter().map(|&v| v as u32).collect()
                }
                _ => gray.as_raw().iter().map(|&v| v as u32).collect(),
            };
            return Ok(Self {
                height: h as usize,
                width: w as usize,
                labels,
                legend: None,
            });
        }
        let bytes = std::fs::read(path).map_err(|source| MaskError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::decode_lmap(&bytes).map_err(|reason| MaskError::LabelFormat {
            path: path.to_path_buf(),
            reason,
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), MaskError> {
        let io_err = |source| MaskError::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut f = std::fs::File::create(path).map_err(io_err)?;
        f.write_all(&self.encode_lmap()).map_err(io_err)
    }
}
