//! Model-free stand-in for an automatic mask generator.
//!
//! Each grid prompt flood-fills the 4-connected region of pixels whose colour
//! is within `tolerance` (per-channel absolute difference) of the prompt
//! pixel. Identical regions are emitted once, in prompt order. The predicted
//! IoU is `1 - clamp(perimeter / (4 * area), 0, 1)`, where the perimeter counts
//! exposed pixel sides including those on the image border.

use std::collections::{HashSet, VecDeque};

use crate::mask::{encode_rle, prompt_grid_rect, BooleanMask, MaskSet, PromptConfig};
use crate::raster::RgbSnapshot;

pub const DEFAULT_COLOR_TOLERANCE: u8 = 12;

fn within(a: [u8; 3], b: [u8; 3], tolerance: u8) -> bool {
    a.iter().zip(&b).all(|(x, y)| x.abs_diff(*y) <= tolerance)
}

fn flood(snapshot: &RgbSnapshot, seed: usize, tolerance: u8) -> Vec<bool> {
    let (h, w) = (snapshot.height, snapshot.width);
    let color = snapshot.rgb(seed / w, seed % w);
    let mut region = vec![false; h * w];
    let mut queue = VecDeque::from([seed]);
    region[seed] = true;
    while let Some(p) = queue.pop_front() {
        let (r, c) = (p / w, p % w);
        let neighbours = [
            (r > 0).then(|| p - w),
            (r + 1 < h).then(|| p + w),
            (c > 0).then(|| p - 1),
            (c + 1 < w).then(|| p + 1),
        ];
        for q in neighbours.into_iter().flatten() {
            if !region[q] && within(snapshot.rgb(q / w, q % w), color, tolerance) {
                region[q] = true;
                queue.push_back(q);
            }
        }
    }
    region
}

fn perimeter(region: &[bool], h: usize, w: usize) -> usize {
    let at = |r: isize, c: isize| {
        r >= 0
            && c >= 0
            && (r as usize) < h
            && (c as usize) < w
            && region[r as usize * w + c as usize]
    };
    let mut exposed = 0;
    for (p, &inside) in region.iter().enumerate() {
        if !inside {
            continue;
        }
        let (r, c) = ((p / w) as isize, (p % w) as isize);
        exposed += [(r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)]
            .iter()
            .filter(|&&(rr, cc)| !at(rr, cc))
            .count();
    }
    exposed
}

pub fn color_oracle_segmenter(
    snapshot: &RgbSnapshot,
    config: &PromptConfig,
    tolerance: u8,
) -> MaskSet {
    let (h, w) = (snapshot.height, snapshot.width);
    // (seed colour, region bitmap) of every emitted region
    let mut regions: Vec<([u8; 3], Vec<bool>)> = Vec::new();
    let mut seen_rles: HashSet<Vec<u32>> = HashSet::new();
    let mut masks = Vec::new();
    for (pr, pc) in prompt_grid_rect(h, w, config.pps) {
        let (r, c) = ((pr as usize).min(h - 1), (pc as usize).min(w - 1));
        let seed = r * w + c;
        let color = snapshot.rgb(r, c);
        // same seed colour and already inside that region: identical flood
        if regions.iter().any(|(col, reg)| *col == color && reg[seed]) {
            continue;
        }
        let region = flood(snapshot, seed, tolerance);
        let rle = encode_rle(&region);
        if !seen_rles.insert(rle) {
            regions.push((color, region));
            continue;
        }
        let area = region.iter().filter(|&&b| b).count();
        let ratio = perimeter(&region, h, w) as f64 / (4.0 * area as f64);
        let iou = 1.0 - ratio.clamp(0.0, 1.0);
        masks.push(BooleanMask::from_bitmap(h, w, &region, iou));
        regions.push((color, region));
    }
    MaskSet::new(snapshot.tile_id.clone(), h, w, *config, masks)
        .expect("masks share the snapshot size")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image(h: usize, w: usize, f: impl Fn(usize, usize) -> [u8; 3]) -> RgbSnapshot {
        let mut px = Vec::with_capacity(h * w * 3);
        for r in 0..h {
            for c in 0..w {
                px.extend_from_slice(&f(r, c));
            }
        }
        RgbSnapshot::new("img", h, w, px, 0).unwrap()
    }

    #[test]
    fn flat_image_single_mask() {
        let img = image(20, 20, |_, _| [90, 120, 60]);
        for pps in [1, 3, 8] {
            let set = color_oracle_segmenter(&img, &PromptConfig::absolute(pps, 0), 12);
            assert_eq!(set.masks.len(), 1);
            assert_eq!(set.masks[0].area(), 400);
            assert!((set.masks[0].predicted_iou() - (1.0 - 80.0 / 1600.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn two_blocks_two_masks() {
        let img = image(
            20,
            20,
            |_, c| if c < 10 { [200, 0, 0] } else { [0, 0, 200] },
        );
        let set = color_oracle_segmenter(&img, &PromptConfig::absolute(2, 0), 12);
        assert_eq!(set.masks.len(), 2);
        assert!(set.masks.iter().all(|m| m.area() == 200));
    }

    #[test]
    fn road_splits_region() {
        // green field split by a grey road column; prompts hit both halves
        let img = image(20, 21, |_, c| {
            if c == 10 {
                [128, 128, 128]
            } else {
                [30, 160, 40]
            }
        });
        let set = color_oracle_segmenter(&img, &PromptConfig::absolute(4, 0), 12);
        let green: Vec<_> = set.masks.iter().filter(|m| m.area() == 200).collect();
        assert_eq!(green.len(), 2);
    }

    #[test]
    fn tolerance_merges_similar_colours() {
        let img = image(10, 10, |_, c| {
            if c < 5 {
                [100, 100, 100]
            } else {
                [105, 100, 100]
            }
        });
        assert_eq!(
            color_oracle_segmenter(&img, &PromptConfig::absolute(2, 0), 12)
                .masks
                .len(),
            1
        );
        assert_eq!(
            color_oracle_segmenter(&img, &PromptConfig::absolute(2, 0), 2)
                .masks
                .len(),
            2
        );
    }

    #[test]
    fn deterministic() {
        let img = image(16, 16, |r, c| [((r * 37 + c * 11) % 5 * 50) as u8, 0, 0]);
        let cfg = PromptConfig::absolute(5, 0);
        assert_eq!(
            color_oracle_segmenter(&img, &cfg, 0),
            color_oracle_segmenter(&img, &cfg, 0)
        );
    }
}
