//! Row-major run-length encoding. Runs alternate background/foreground and
//! always start with a background run, which may be zero.

use super::MaskError;

pub fn encode_rle(bitmap: &[bool]) -> Vec<u32> {
    let mut runs = Vec::new();
    let mut current = false;
    let mut count = 0u32;
    for &b in bitmap {
        if b != current {
            runs.push(count);
            count = 0;
            current = b;
        }
        count += 1;
    }
    runs.push(count);
    runs
}

pub fn decode_rle(runs: &[u32], height: usize, width: usize) -> Result<Vec<bool>, MaskError> {
    let expected = (height * width) as u64;
    let found: u64 = runs.iter().map(|&r| r as u64).sum();
    if found != expected {
        return Err(MaskError::RunSum { expected, found });
    }
    let mut out = Vec::with_capacity(height * width);
    for (i, &r) in runs.iter().enumerate() {
        out.extend(std::iter::repeat_n(i % 2 == 1, r as usize));
    }
    Ok(out)
}

/// One class-agnostic mask with its confidence metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct BooleanMask {
    height: usize,
    width: usize,
    rle: Vec<u32>,
    predicted_iou: f64,
    area: u64,
}

impl BooleanMask {
    pub fn from_bitmap(height: usize, width: usize, bitmap: &[bool], predicted_iou: f64) -> Self {
        assert_eq!(bitmap.len(), height * width, "bitmap length must equal h*w");
        let area = bitmap.iter().filter(|&&b| b).count() as u64;
        Self {
            height,
            width,
            rle: encode_rle(bitmap),
            predicted_iou,
            area,
        }
    }

    /// Validates the run sum and computes the area from the runs.
    pub fn from_rle(
        height: usize,
        width: usize,
        rle: Vec<u32>,
        predicted_iou: f64,
    ) -> Result<Self, MaskError> {
        let expected = (height * width) as u64;
        let found: u64 = rle.iter().map(|&r| r as u64).sum();
        if found != expected {
            return Err(MaskError::RunSum { expected, found });
        }
        let area = rle.iter().skip(1).step_by(2).map(|&r| r as u64).sum();
        Ok(Self {
            height,
            width,
            rle,
            predicted_iou,
            area,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rle(&self) -> &[u32] {
        &self.rle
    }

    pub fn predicted_iou(&self) -> f64 {
        self.predicted_iou
    }

    pub fn area(&self) -> u64 {
        self.area
    }

    pub fn to_bitmap(&self) -> Vec<bool> {
        decode_rle(&self.rle, self.height, self.width).expect("run sum checked at construction")
    }

    /// Half-open `[start, end)` row-major index ranges of foreground runs.
    pub fn foreground_runs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let mut pos = 0usize;
        self.rle.iter().enumerate().filter_map(move |(i, &r)| {
            let start = pos;
            pos += r as usize;
            (i % 2 == 1 && r > 0).then_some((start, pos))
        })
    }
}
