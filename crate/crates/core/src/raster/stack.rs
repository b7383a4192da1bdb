use std::collections::HashSet;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::RasterError;

pub const MSST_MAGIC: &[u8; 4] = b"MSST";
pub const MSST_VERSION: u32 = 1;

/// A `T x H x W x C` reflectance tensor for one tile.
///
/// Storage is timestep-major then row-major with channels innermost: the value
/// for `(t, row, col, ch)` lives at `((t * H + row) * W + col) * C + ch`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultispectralStack {
    data: Vec<f32>,
    timesteps: usize,
    height: usize,
    width: usize,
    channels: usize,
    band_names: Vec<String>,
    tile_id: String,
}

impl MultispectralStack {
    pub fn new(
        tile_id: impl Into<String>,
        dims: [usize; 4],
        band_names: Vec<String>,
        data: Vec<f32>,
    ) -> Result<Self, RasterError> {
        let [timesteps, height, width, channels] = dims;
        if timesteps == 0 || height == 0 || width == 0 {
            return Err(RasterError::InvalidStack(format!(
                "dimensions must be positive, got T={timesteps} H={height} W={width}"
            )));
        }
        if channels < 3 {
            return Err(RasterError::InvalidStack(format!(
                "need at least 3 channels, got {channels}"
            )));
        }
        if band_names.len() != channels {
            return Err(RasterError::InvalidStack(format!(
                "{} band names for {channels} channels",
                band_names.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &band_names {
            if !seen.insert(name.as_str()) {
                return Err(RasterError::InvalidStack(format!(
                    "duplicate band name {name:?}"
                )));
            }
        }
        let expected = timesteps * height * width * channels;
        if data.len() != expected {
            return Err(RasterError::InvalidStack(format!(
                "data holds {} values, expected {expected}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(RasterError::InvalidStack(format!(
                "reflectance at flat index {pos} is {} (must be finite and >= 0)",
                data[pos]
            )));
        }
        Ok(Self {
            data,
            timesteps,
            height,
            width,
            channels,
            band_names,
            tile_id: tile_id.into(),
        })
    }

    pub fn timesteps(&self) -> usize {
        self.timesteps
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn band_names(&self) -> &[String] {
        &self.band_names
    }

    pub fn tile_id(&self) -> &str {
        &self.tile_id
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn band_index(&self, name: &str) -> Option<usize> {
        self.band_names.iter().position(|b| b == name)
    }

    #[inline]
    pub fn value(&self, t: usize, row: usize, col: usize, ch: usize) -> f32 {
        self.data[((t * self.height + row) * self.width + col) * self.channels + ch]
    }

    /// All pixels of timestep `t`, `H * W * C` values.
    pub fn timestep(&self, t: usize) -> &[f32] {
        let len = self.height * self.width * self.channels;
        &self.data[t * len..(t + 1) * len]
    }

    /// Reads the flat binary layout:
    ///
    /// ```text
    /// magic    "MSST"
    /// version  u32 LE (= 1)
    /// T H W C  u32 LE each
    /// bands    C x (u32 LE byte length, UTF-8 name)
    /// body     T*H*W*C f32 LE, index ((t*H + row)*W + col)*C + ch
    /// ```
    ///
    /// The tile id is the file stem.
    pub fn read_msst(path: &Path) -> Result<Self, RasterError> {
        let bytes = fs::read(path).map_err(|source| RasterError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let tile_id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::decode_msst(tile_id, &bytes).map_err(|reason| RasterError::Format {
            path: path.to_path_buf(),
            reason,
        })
    }

    pub fn write_msst(&self, path: &Path) -> Result<(), RasterError> {
        let io_err = |source| RasterError::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut file = std::io::BufWriter::new(fs::File::create(path).map_err(io_err)?);
        file.write_all(&self.encode_msst()).map_err(io_err)?;
        file.flush().map_err(io_err)
    }

    pub fn encode_msst(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(24 + self.data.len() * 4);
        out.extend_from_slice(MSST_MAGIC);
        for v in [
            MSST_VERSION,
            self.timesteps as u32,
            self.height as u32,
            self.width as u32,
            self.channels as u32,
        ] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for name in &self.band_names {
            out.extend_from_slice(&(name.len() as u32).to_le_bytes());
            out.extend_from_slice(name.as_bytes());
        }
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn decode_msst(tile_id: String, bytes: &[u8]) -> Result<Self, String> {
        let mut cursor = bytes;
        let mut magic = [0u8; 4];
        cursor
            .read_exact(&mut magic)
            .map_err(|_| "truncated header".to_string())?;
        if &magic != MSST_MAGIC {
            return Err(format!("bad magic {magic:?}"));
        }
        let read_u32 = |cursor: &mut &[u8]| -> Result<u32, String> {
            let mut buf = [0u8; 4];
            cursor
                .read_exact(&mut buf)
                .map_err(|_| "truncated header".to_string())?;
            Ok(u32::from_le_bytes(buf))
        };
        let version = read_u32(&mut cursor)?;
        if version != MSST_VERSION {
            return Err(format!("unsupported version {version}"));
        }
        let dims = [
            read_u32(&mut cursor)? as usize,
            read_u32(&mut cursor)? as usize,
            read_u32(&mut cursor)? as usize,
            read_u32(&mut cursor)? as usize,
        ];
        let mut band_names = Vec::with_capacity(dims[3]);
        for i in 0..dims[3] {
            let len = read_u32(&mut cursor)? as usize;
            if cursor.len() < len {
                return Err(format!("truncated band name {i}"));
            }
            let (name, rest) = cursor.split_at(len);
            band_names.push(
                String::from_utf8(name.to_vec())
                    .map_err(|_| format!("band name {i} is not UTF-8"))?,
            );
            cursor = rest;
        }
        let count = dims
            .iter()
            .try_fold(1usize, |acc, d| acc.checked_mul(*d))
            .ok_or_else(|| "dimension overflow".to_string())?;
        if cursor.len() != count * 4 {
            return Err(format!(
                "body holds {} bytes, expected {}",
                cursor.len(),
                count * 4
            ));
        }
        let data = cursor
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        Self::new(tile_id, dims, band_names, data).map_err(|e| e.to_string())
    }
}

/// Channel indices of the red, green and blue bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandTriplet {
    pub red_index: usize,
    pub green_index: usize,
    pub blue_index: usize,
}

impl BandTriplet {
    pub fn new(
        red: usize,
        green: usize,
        blue: usize,
        channels: usize,
    ) -> Result<Self, RasterError> {
        for index in [red, green, blue] {
            if index >= channels {
                return Err(RasterError::BandOutOfRange { index, channels });
            }
        }
        if red == green || red == blue || green == blue {
            return Err(RasterError::BandConfig(format!(
                "red/green/blue indices must be distinct, got {red}/{green}/{blue}"
            )));
        }
        Ok(Self {
            red_index: red,
            green_index: green,
            blue_index: blue,
        })
    }

    /// Resolves band names (e.g. `"B4"`, `"B3"`, `"B2"` for Sentinel-2).
    pub fn from_names(
        stack: &MultispectralStack,
        red: &str,
        green: &str,
        blue: &str,
    ) -> Result<Self, RasterError> {
        let find = |name: &str| {
            stack
                .band_index(name)
                .ok_or_else(|| RasterError::BandConfig(format!("no band named {name:?}")))
        };
        Self::new(find(red)?, find(green)?, find(blue)?, stack.channels())
    }

    pub fn as_array(&self) -> [usize; 3] {
        [self.red_index, self.green_index, self.blue_index]
    }
}
