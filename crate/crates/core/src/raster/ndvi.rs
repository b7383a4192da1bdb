use super::{MultispectralStack, RasterError};

/// Spatial-mean NDVI per timestep. `None` marks a timestep where no pixel had
/// a non-zero `nir + red` denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct NdviSeries {
    pub values: Vec<Option<f64>>,
    /// Optional `T x H x W` per-pixel NDVI, `None` where the denominator is 0.
    pub per_pixel: Option<Vec<Option<f32>>>,
}

impl NdviSeries {
    pub fn from_means(values: Vec<Option<f64>>) -> Self {
        Self {
            values,
            per_pixel: None,
        }
    }
}

/// `(nir - red) / (nir + red)`, `None` when the denominator is zero.
#[inline]
pub fn ndvi_pixel(nir: f64, red: f64) -> Option<f64> {
    let denom = nir + red;
    if denom == 0.0 {
        None
    } else {
        Some((nir - red) / denom)
    }
}

pub fn compute_ndvi(
    stack: &MultispectralStack,
    nir: usize,
    red: usize,
    keep_per_pixel: bool,
) -> Result<NdviSeries, RasterError> {
    let channels = stack.channels();
    for index in [nir, red] {
        if index >= channels {
            return Err(RasterError::BandOutOfRange { index, channels });
        }
    }
    if nir == red {
        return Err(RasterError::BandConfig(format!(
            "nir and red must differ, both are {nir}"
        )));
    }
    let pixels = stack.height() * stack.width();
    let mut per_pixel = keep_per_pixel.then(|| Vec::with_capacity(pixels * stack.timesteps()));
    let mut values = Vec::with_capacity(stack.timesteps());
    for t in 0..stack.timesteps() {
        let mut sum = 0.0f64;
        let mut valid = 0usize;
        for px in stack.timestep(t).chunks_exact(channels) {
            let v = ndvi_pixel(px[nir] as f64, px[red] as f64);
            if let Some(v) = v {
                sum += v;
                valid += 1;
            }
            if let Some(pp) = per_pixel.as_mut() {
                pp.push(v.map(|v| v as f32));
            }
        }
        values.push((valid > 0).then(|| sum / valid as f64));
    }
    Ok(NdviSeries { values, per_pixel })
}

/// Argmax over valid timesteps of the spatial-mean NDVI; ties go to the
/// smallest index.
pub fn select_max_ndvi_timestep(series: &NdviSeries) -> Result<usize, RasterError> {
    let mut best: Option<(usize, f64)> = None;
    for (t, v) in series.values.iter().enumerate() {
        let Some(v) = *v else { continue };
        if !v.is_finite() {
            continue;
        }
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((t, v)),
        }
    }
    best.map(|(t, _)| t).ok_or(RasterError::UnusableTile)
}
