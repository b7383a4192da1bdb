//! Synthetic field scenes with known ground truth.
//!
//! Fields are either vertical bands or Voronoi cells over random seeds, each
//! assigned a crop class with its own colour. An optional road grid paints
//! contrasting lines over the fields; roads carry their own ground-truth
//! class. Random draws use ChaCha8 seeded from the scene seed.

use std::path::Path;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::HarnessError;
use crate::mask::LabelMap;
use crate::raster::RgbSnapshot;

/// Colours for classes 1.. in order; far apart in every channel pair.
pub const PALETTE: [[u8; 3]; 8] = [
    [34, 139, 34],
    [218, 165, 32],
    [139, 69, 19],
    [70, 130, 180],
    [154, 205, 50],
    [199, 21, 133],
    [0, 206, 209],
    [245, 222, 179],
];
pub const ROAD_COLOR: [u8; 3] = [60, 60, 60];

#[derive(Debug, Clone, PartialEq)]
pub enum Layout {
    /// `count` equal-width vertical bands, classes 1..=count.
    Bands { count: usize },
    /// `cells` Voronoi cells, each assigned one of `classes` classes.
    Voronoi { cells: usize, classes: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoadGrid {
    /// Rows at which horizontal roads start.
    pub every: usize,
    pub width: usize,
    pub horizontal: bool,
    pub vertical: bool,
    pub label: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub id: String,
    pub side: usize,
    pub layout: Layout,
    pub roads: Option<RoadGrid>,
    pub seed: u64,
}

pub struct Scene {
    pub snapshot: RgbSnapshot,
    pub ground_truth: LabelMap,
}

fn class_color(class: u32) -> [u8; 3] {
    PALETTE[(class as usize - 1) % PALETTE.len()]
}

pub fn generate(spec: &SceneSpec) -> Scene {
    let side = spec.side;
    let mut labels = vec![0u32; side * side];
    match spec.layout {
        Layout::Bands { count } => {
            for r in 0..side {
                for c in 0..side {
                    labels[r * side + c] = (c * count / side) as u32 + 1;
                }
            }
        }
        Layout::Voronoi { cells, classes } => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let seeds: Vec<(i64, i64, u32)> = (0..cells)
                .map(|_| {
                    let r = (rng.next_u64() % side as u64) as i64;
                    let c = (rng.next_u64() % side as u64) as i64;
                    let class = (rng.next_u64() % classes as u64) as u32 + 1;
                    (r, c, class)
                })
                .collect();
            for r in 0..side {
                for c in 0..side {
                    let (ri, ci) = (r as i64, c as i64);
                    let nearest = seeds
                        .iter()
                        .min_by_key(|(sr, sc, _)| (sr - ri).pow(2) + (sc - ci).pow(2))
                        .expect("at least one cell");
                    labels[r * side + c] = nearest.2;
                }
            }
        }
    }
    let mut colors: Vec<[u8; 3]> = labels.iter().map(|&l| class_color(l)).collect();
    if let Some(road) = spec.roads {
        for r in 0..side {
            for c in 0..side {
                let on_h = road.horizontal && r > 0 && r % road.every < road.width;
                let on_v = road.vertical && c > 0 && c % road.every < road.width;
                if on_h || on_v {
                    labels[r * side + c] = road.label;
                    colors[r * side + c] = ROAD_COLOR;
                }
            }
        }
    }
    let pixels = colors.into_iter().flatten().collect();
    Scene {
        snapshot: RgbSnapshot::new(spec.id.clone(), side, side, pixels, 0).expect("sized"),
        ground_truth: LabelMap::new(side, side, labels).expect("sized"),
    }
}

/// Three vertical fields; with `fragmented`, horizontal roads at every
/// `side / 3` rows cut each field into three pieces.
pub fn three_field_scene(id: &str, side: usize, fragmented: bool) -> Scene {
    generate(&SceneSpec {
        id: id.to_string(),
        side,
        layout: Layout::Bands { count: 3 },
        roads: fragmented.then_some(RoadGrid {
            every: side / 3,
            width: 2,
            horizontal: true,
            vertical: false,
            label: 4,
        }),
        seed: 0,
    })
}

/// Writes `snapshots/<id>.png` and `labels/<id>.lmap` under `root`.
pub fn write_scene(root: &Path, scene: &Scene) -> Result<(), HarnessError> {
    for dir in ["snapshots", "labels"] {
        let d = root.join(dir);
        std::fs::create_dir_all(&d).map_err(|source| HarnessError::Io { path: d, source })?;
    }
    let id = &scene.snapshot.tile_id;
    scene
        .snapshot
        .write_png(&root.join("snapshots").join(format!("{id}.png")))?;
    scene
        .ground_truth
        .write(&root.join("labels").join(format!("{id}.lmap")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bands_have_three_classes() {
        let s = three_field_scene("a", 30, false);
        let mut classes: Vec<u32> = s.ground_truth.labels.clone();
        classes.sort();
        classes.dedup();
        assert_eq!(classes, vec![1, 2, 3]);
        assert_eq!(s.snapshot.rgb(0, 0), PALETTE[0]);
        assert_eq!(s.snapshot.rgb(0, 29), PALETTE[2]);
    }

    #[test]
    fn roads_carry_their_own_class() {
        let s = three_field_scene("b", 30, true);
        assert_eq!(s.ground_truth.get(10, 5), 4);
        assert_eq!(s.snapshot.rgb(11, 5), ROAD_COLOR);
        assert_eq!(s.ground_truth.get(0, 5), 1);
        assert_eq!(s.ground_truth.get(12, 5), 1);
    }

    #[test]
    fn voronoi_is_seeded() {
        let spec = SceneSpec {
            id: "v".into(),
            side: 24,
            layout: Layout::Voronoi {
                cells: 6,
                classes: 3,
            },
            roads: None,
            seed: 9,
        };
        assert_eq!(generate(&spec).ground_truth, generate(&spec).ground_truth);
        let other = SceneSpec {
            seed: 10,
            ..spec.clone()
        };
        assert_ne!(generate(&spec).ground_truth, generate(&other).ground_truth);
    }
}
