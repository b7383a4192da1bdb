//! Independent reference implementations used as test oracles. They favour
//! obviousness over speed and share no code with the library.
#![allow(dead_code)]

use fieldseg::mask::{BooleanMask, LabelMap, MaskSet};
use fieldseg::vectorize::{Ring, ShapeMap};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform in `0..n` (slight modulo bias is irrelevant here).
    pub fn below(&mut self, n: u64) -> u64 {
        self.0.next_u64() % n
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below((hi - lo + 1) as u64) as usize
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

pub fn random_labels(rng: &mut Rng, n: usize, k: u32) -> Vec<u32> {
    (0..n).map(|_| rng.below(k as u64) as u32).collect()
}

/// Labels from a random number (1 to `max_k`) of classes.
pub fn labels_up_to(rng: &mut Rng, n: usize, max_k: usize) -> Vec<u32> {
    let k = rng.range(1, max_k) as u32;
    random_labels(rng, n, k)
}

/// Blobby labels: a random walk over label values so regions are contiguous.
pub fn random_label_map(rng: &mut Rng, h: usize, w: usize, k: u32) -> LabelMap {
    let mut labels = vec![0u32; h * w];
    for r in 0..h {
        for c in 0..w {
            labels[r * w + c] = match rng.below(4) {
                0 => rng.below(k as u64) as u32,
                1 if r > 0 => labels[(r - 1) * w + c],
                _ if c > 0 => labels[r * w + c - 1],
                _ => rng.below(k as u64) as u32,
            };
        }
    }
    LabelMap::new(h, w, labels).unwrap()
}

pub fn random_bitmap(rng: &mut Rng, h: usize, w: usize, density: f64) -> Vec<bool> {
    (0..h * w).map(|_| rng.unit() < density).collect()
}

/// Component ids by repeated min-label relaxation over 4-neighbours until
/// nothing changes. Pixels connect when their keys are equal.
pub fn relaxation_components<K: PartialEq>(h: usize, w: usize, keys: &[K]) -> Vec<usize> {
    let mut id: Vec<usize> = (0..h * w).collect();
    loop {
        let mut changed = false;
        for r in 0..h {
            for c in 0..w {
                let i = r * w + c;
                let mut neighbours = Vec::new();
                if r > 0 {
                    neighbours.push(i - w);
                }
                if r + 1 < h {
                    neighbours.push(i + w);
                }
                if c > 0 {
                    neighbours.push(i - 1);
                }
                if c + 1 < w {
                    neighbours.push(i + 1);
                }
                for j in neighbours {
                    if keys[j] == keys[i] && id[j] < id[i] {
                        id[i] = id[j];
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return id;
        }
    }
}

fn component_stats(h: usize, w: usize, id: &[usize]) -> (Vec<usize>, Vec<bool>) {
    let mut size = vec![0usize; h * w];
    let mut border = vec![false; h * w];
    for r in 0..h {
        for c in 0..w {
            let k = id[r * w + c];
            size[k] += 1;
            if r == 0 || c == 0 || r + 1 == h || c + 1 == w {
                border[k] = true;
            }
        }
    }
    (size, border)
}

/// Fill enclosed background regions smaller than `mmra`, then drop foreground
/// regions smaller than `mmra`.
pub fn mmra_oracle(h: usize, w: usize, bits: &[bool], mmra: u64) -> Vec<bool> {
    let mmra = mmra as usize;
    let mut out = bits.to_vec();
    let id = relaxation_components(h, w, &out);
    let (size, border) = component_stats(h, w, &id);
    for i in 0..h * w {
        if !out[i] && !border[id[i]] && size[id[i]] < mmra {
            out[i] = true;
        }
    }
    let id = relaxation_components(h, w, &out);
    let (size, _) = component_stats(h, w, &id);
    for i in 0..h * w {
        if out[i] && size[id[i]] < mmra {
            out[i] = false;
        }
    }
    out
}

/// True when mask `a` outranks mask `b`.
fn outranks(set: &MaskSet, a: usize, b: usize) -> bool {
    let (ma, mb) = (&set.masks[a], &set.masks[b]);
    if ma.predicted_iou() != mb.predicted_iou() {
        return ma.predicted_iou() > mb.predicted_iou();
    }
    if ma.area() != mb.area() {
        return ma.area() > mb.area();
    }
    a < b
}

/// Per pixel, the best mask containing it; winners numbered 1.. by rank.
pub fn consolidate_oracle(set: &MaskSet) -> Vec<u32> {
    let bitmaps: Vec<Vec<bool>> = set.masks.iter().map(BooleanMask::to_bitmap).collect();
    let winner: Vec<Option<usize>> = (0..set.height * set.width)
        .map(|p| {
            let mut best: Option<usize> = None;
            for (m, bits) in bitmaps.iter().enumerate() {
                if bits[p] && best.is_none_or(|b| outranks(set, m, b)) {
                    best = Some(m);
                }
            }
            best
        })
        .collect();
    let mut winners: Vec<usize> = winner.iter().flatten().copied().collect();
    winners.sort();
    winners.dedup();
    // insertion sort by rank
    let mut ranked: Vec<usize> = Vec::new();
    for m in winners {
        let pos = ranked
            .iter()
            .position(|&x| outranks(set, m, x))
            .unwrap_or(ranked.len());
        ranked.insert(pos, m);
    }
    winner
        .iter()
        .map(|w| match w {
            Some(m) => ranked.iter().position(|x| x == m).unwrap() as u32 + 1,
            None => 0,
        })
        .collect()
}

/// Window origins by checking every candidate position.
pub fn tiling_oracle(h: usize, w: usize, side: usize, stride: usize) -> Vec<(usize, usize)> {
    let keep = |x: usize, extent: usize| x.is_multiple_of(stride) || x == extent - side;
    let mut out = Vec::new();
    for r in 0..=h - side {
        for c in 0..=w - side {
            if keep(r, h) && keep(c, w) {
                out.push((r, c));
            }
        }
    }
    out
}

/// Even-odd crossing test for the point `(y, x)`.
pub fn ring_contains(ring: &Ring, y: f64, x: f64) -> bool {
    let mut inside = false;
    for e in ring.windows(2) {
        let (y0, x0) = (e[0].0 as f64, e[0].1 as f64);
        let (y1, x1) = (e[1].0 as f64, e[1].1 as f64);
        if (y0 > y) != (y1 > y) {
            let xc = x0 + (y - y0) / (y1 - y0) * (x1 - x0);
            if x < xc {
                inside = !inside;
            }
        }
    }
    inside
}

/// Labels each pixel centre by the polygon that contains it.
pub fn point_in_polygon_raster(shape: &ShapeMap) -> Vec<u32> {
    let mut out = vec![0u32; shape.height * shape.width];
    for r in 0..shape.height {
        for c in 0..shape.width {
            let (y, x) = (r as f64 + 0.5, c as f64 + 0.5);
            for p in &shape.polygons {
                if ring_contains(&p.exterior, y, x)
                    && !p.holes.iter().any(|h| ring_contains(h, y, x))
                {
                    out[r * shape.width + c] = p.label;
                }
            }
        }
    }
    out
}

/// Twice the shoelace area, computed in floating point.
pub fn shoelace2(ring: &Ring) -> f64 {
    ring.windows(2)
        .map(|e| e[0].1 as f64 * e[1].0 as f64 - e[1].1 as f64 * e[0].0 as f64)
        .sum()
}

pub fn random_maskset(rng: &mut Rng) -> MaskSet {
    let h = rng.range(1, 16);
    let w = rng.range(1, 16);
    let n = rng.range(0, 6);
    let masks = (0..n)
        .map(|_| {
            // rectangles plus speckle, with coarse IoU values so ties happen
            let (r0, c0) = (rng.range(0, h - 1), rng.range(0, w - 1));
            let (r1, c1) = (rng.range(r0, h - 1), rng.range(c0, w - 1));
            let mut bits = vec![false; h * w];
            for r in 0..h {
                for c in 0..w {
                    bits[r * w + c] =
                        (r0..=r1).contains(&r) && (c0..=c1).contains(&c) || rng.below(10) == 0;
                }
            }
            let iou = rng.below(4) as f64 / 4.0;
            BooleanMask::from_bitmap(h, w, &bits, iou)
        })
        .collect();
    MaskSet::new(
        "rand",
        h,
        w,
        fieldseg::mask::PromptConfig::absolute(1, 0),
        masks,
    )
    .unwrap()
}
