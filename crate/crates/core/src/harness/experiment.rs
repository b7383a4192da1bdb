use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::{
    color_oracle_segmenter, ConsensusReport, ExperimentConfig, HarnessError, SegmenterKind,
};
use crate::mask::{consolidate, filter_mmra, read_maskset, LabelMap, MaskSet, PromptConfig};
use crate::metrics::{score_label_maps, ConsensusScores};
use crate::raster::{
    compute_ndvi, extract_rgb_snapshot, read_exclusion_list, sample_select, screen_clouds,
    select_max_ndvi_timestep, tile_image, BandTriplet, MultispectralStack, RasterError,
    RgbSnapshot, ScreenPolicy, TileSpec,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SampleStatus {
    Ok,
    Failed { reason: String },
}

/// One scored (sub-tile, pps%, mmra%) cell. Scores and the unassigned
/// fraction are rounded to 6 decimals, the precision the report is written in.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleResult {
    pub tile: TileSpec,
    pub sample_id: String,
    pub prompt: PromptConfig,
    pub status: SampleStatus,
    pub scores: Option<ConsensusScores>,
    pub mask_count: usize,
    pub unassigned_fraction: f64,
    /// Wall-clock time for the cell; not part of emitted reports.
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedTile {
    pub tile_id: String,
    pub reason: String,
}

pub(crate) fn quantize(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn quantize_scores(s: ConsensusScores) -> ConsensusScores {
    ConsensusScores {
        fmi: quantize(s.fmi),
        ari: quantize(s.ari),
        nmi: quantize(s.nmi),
        v_measure: quantize(s.v_measure),
        homogeneity: quantize(s.homogeneity),
        completeness: quantize(s.completeness),
        degenerate: s.degenerate,
    }
}

pub fn external_mask_path(root: &Path, sample_id: &str, prompt: &PromptConfig) -> PathBuf {
    root.join("masks")
        .join(sample_id)
        .join(format!("pps{}_mmra{}.json", prompt.pps, prompt.mmra))
}

fn list_tiles(root: &Path) -> Result<Vec<(String, PathBuf)>, HarnessError> {
    let dir = root.join("labels");
    let entries = std::fs::read_dir(&dir).map_err(|e| HarnessError::Data {
        path: dir.clone(),
        reason: format!("cannot list ground-truth directory: {e}"),
    })?;
    let mut tiles: BTreeMap<String, PathBuf> = BTreeMap::new();
    for entry in entries {
        let path = entry
            .map_err(|source| HarnessError::Io {
                path: dir.clone(),
                source,
            })?
            .path();
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        if !matches!(ext.as_deref(), Some("lmap" | "png")) {
            continue;
        }
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        if let Some(prev) = tiles.insert(stem.clone(), path.clone()) {
            return Err(HarnessError::Data {
                path,
                reason: format!("tile {stem} also has ground truth at {}", prev.display()),
            });
        }
    }
    Ok(tiles.into_iter().collect())
}

fn load_ground_truth(path: &Path) -> Result<LabelMap, HarnessError> {
    LabelMap::read(path).map_err(|e| HarnessError::Data {
        path: path.to_path_buf(),
        reason: format!("corrupt ground truth: {e}"),
    })
}

/// The RGB snapshot for a tile: from `stacks/<tile>.msst` at the peak
/// spatial-mean NDVI timestep when present, else `snapshots/<tile>.png`.
/// `Ok(Err(reason))` means the tile is unusable.
pub fn load_tile_snapshot(
    root: &Path,
    tile_id: &str,
    config: &ExperimentConfig,
) -> Result<Result<RgbSnapshot, String>, HarnessError> {
    let stack_path = root.join("stacks").join(format!("{tile_id}.msst"));
    if stack_path.exists() {
        let stack = MultispectralStack::read_msst(&stack_path)?;
        let b = &config.bands;
        let bands = BandTriplet::from_names(&stack, &b.red, &b.green, &b.blue)?;
        let nir = stack
            .band_index(&b.nir)
            .ok_or_else(|| RasterError::BandConfig(format!("no band named {:?}", b.nir)))?;
        let series = compute_ndvi(&stack, nir, bands.red_index, false)?;
        let t = match select_max_ndvi_timestep(&series) {
            Ok(t) => t,
            Err(RasterError::UnusableTile) => return Ok(Err("no valid NDVI timestep".into())),
            Err(e) => return Err(e.into()),
        };
        return Ok(Ok(extract_rgb_snapshot(&stack, t, bands, config.stretch)?));
    }
    let png = root.join("snapshots").join(format!("{tile_id}.png"));
    if png.exists() {
        let mut snap = RgbSnapshot::read_png(&png)?;
        snap.tile_id = tile_id.to_string();
        return Ok(Ok(snap));
    }
    Err(HarnessError::Data {
        path: stack_path,
        reason: format!("tile {tile_id} has neither a stack nor a snapshot"),
    })
}

struct UsableTile {
    id: String,
    height: usize,
    width: usize,
}

enum Screened {
    Usable(UsableTile),
    Skipped(SkippedTile),
}

fn screen_tile(
    root: &Path,
    id: &str,
    gt_path: &Path,
    config: &ExperimentConfig,
    policy: &ScreenPolicy,
) -> Result<Screened, HarnessError> {
    let gt = load_ground_truth(gt_path)?;
    let snap = match load_tile_snapshot(root, id, config)? {
        Ok(s) => s,
        Err(reason) => {
            return Ok(Screened::Skipped(SkippedTile {
                tile_id: id.to_string(),
                reason,
            }))
        }
    };
    if (snap.height, snap.width) != gt.dims() {
        return Err(HarnessError::Data {
            path: gt_path.to_path_buf(),
            reason: format!(
                "ground truth is {:?} but the snapshot is {:?}",
                gt.dims(),
                (snap.height, snap.width)
            ),
        });
    }
    let screen = screen_clouds(&snap, policy);
    if !screen.usable {
        let reason = if screen.excluded {
            "excluded".to_string()
        } else {
            format!("cloud score {:.6}", screen.score)
        };
        return Ok(Screened::Skipped(SkippedTile {
            tile_id: id.to_string(),
            reason,
        }));
    }
    Ok(Screened::Usable(UsableTile {
        id: id.to_string(),
        height: gt.height,
        width: gt.width,
    }))
}

fn obtain_masks(
    root: &Path,
    config: &ExperimentConfig,
    sample_id: &str,
    snapshot: &RgbSnapshot,
    prompt: &PromptConfig,
) -> Result<MaskSet, String> {
    match config.segmenter {
        SegmenterKind::ColorOracle => Ok(color_oracle_segmenter(
            snapshot,
            prompt,
            config.color_tolerance,
        )),
        SegmenterKind::External => {
            let path = external_mask_path(root, sample_id, prompt);
            let set = read_maskset(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            if (set.height, set.width) != (snapshot.height, snapshot.width) {
                return Err(format!(
                    "{}: mask set is {}x{} but the sub-tile is {}x{}",
                    path.display(),
                    set.height,
                    set.width,
                    snapshot.height,
                    snapshot.width
                ));
            }
            Ok(set)
        }
    }
}

fn evaluate_cell(
    root: &Path,
    config: &ExperimentConfig,
    spec: &TileSpec,
    snapshot: &RgbSnapshot,
    gt: &LabelMap,
    pps_percent: f64,
    mmra_percent: f64,
) -> SampleResult {
    let start = Instant::now();
    let sample_id = spec.id();
    let prompt = PromptConfig::resolve(spec.side, pps_percent, mmra_percent);
    let outcome = (|| {
        let set = obtain_masks(root, config, &sample_id, snapshot, &prompt)?;
        let mask_count = set.masks.len();
        let filtered = MaskSet {
            masks: set
                .masks
                .iter()
                .map(|m| filter_mmra(m, prompt.mmra))
                .collect(),
            ..set
        };
        let pred = consolidate(&filtered).map_err(|e| e.to_string())?;
        let unassigned =
            pred.labels.iter().filter(|&&l| l == 0).count() as f64 / pred.labels.len() as f64;
        let scores =
            score_label_maps(gt, &pred, config.exclude_background).map_err(|e| e.to_string())?;
        Ok::<_, String>((mask_count, unassigned, scores))
    })();
    let (status, scores, mask_count, unassigned_fraction) = match outcome {
        Ok((n, u, s)) => (SampleStatus::Ok, Some(quantize_scores(s)), n, quantize(u)),
        Err(reason) => (SampleStatus::Failed { reason }, None, 0, 0.0),
    };
    SampleResult {
        tile: spec.clone(),
        sample_id,
        prompt,
        status,
        scores,
        mask_count,
        unassigned_fraction,
        elapsed: start.elapsed(),
    }
}

/// Runs the full sweep. Rows come out ordered by aoi factor (config order),
/// sub-tile (parent id, origin row, origin col), pps% and mmra% (config
/// order), independent of parallel execution.
pub fn run_experiment(
    config: &ExperimentConfig,
    data_root: &Path,
) -> Result<ConsensusReport, HarnessError> {
    config.validate()?;
    let mut policy = config.screen.clone();
    if let Some(list) = &config.exclusion_list {
        let path = if list.is_absolute() {
            list.clone()
        } else {
            data_root.join(list)
        };
        let ids = read_exclusion_list(&path)
            .map_err(|e| HarnessError::Config(format!("exclusion list: {e}")))?;
        policy.exclusions.extend(ids);
    }

    let tiles = list_tiles(data_root)?;
    let screened: Vec<Screened> = tiles
        .par_iter()
        .map(|(id, gt_path)| screen_tile(data_root, id, gt_path, config, &policy))
        .collect::<Result<_, _>>()?;
    let mut usable = Vec::new();
    let mut skipped = Vec::new();
    for s in screened {
        match s {
            Screened::Usable(t) => usable.push(t),
            Screened::Skipped(s) => {
                log::info!("skipping tile {}: {}", s.tile_id, s.reason);
                skipped.push(s);
            }
        }
    }
    let gt_paths: BTreeMap<&str, &PathBuf> = tiles.iter().map(|(id, p)| (id.as_str(), p)).collect();

    let mut rows = Vec::new();
    for &factor in &config.aoi_factors {
        let mut candidates = Vec::new();
        for t in &usable {
            let side = t.height.min(t.width) / factor;
            let stride = config.stride.stride(side.max(1));
            candidates.extend(tile_image(&t.id, t.height, t.width, factor, stride)?);
        }
        let n = config.samples_per_set.min(candidates.len());
        let sampled: BTreeSet<TileSpec> = sample_select(&candidates, n, config.seed)?
            .into_iter()
            .collect();
        log::info!(
            "factor {factor}: {n} of {} sub-tiles sampled",
            candidates.len()
        );

        let mut by_parent: BTreeMap<&str, Vec<&TileSpec>> = BTreeMap::new();
        for spec in &sampled {
            by_parent
                .entry(spec.parent_tile_id.as_str())
                .or_default()
                .push(spec);
        }
        for (parent, specs) in by_parent {
            let gt = load_ground_truth(gt_paths[parent])?;
            let snap = load_tile_snapshot(data_root, parent, config)?.map_err(|reason| {
                HarnessError::Data {
                    path: data_root.join(parent),
                    reason,
                }
            })?;
            let crops: Vec<(&TileSpec, RgbSnapshot, LabelMap)> = specs
                .into_iter()
                .map(|spec| Ok((spec, snap.crop(spec, spec.id())?, gt.crop(spec)?)))
                .collect::<Result<_, HarnessError>>()?;
            let cells: Vec<(usize, f64, f64)> = (0..crops.len())
                .flat_map(|i| {
                    config
                        .pps_percents
                        .iter()
                        .flat_map(move |&p| config.mmra_percents.iter().map(move |&m| (i, p, m)))
                })
                .collect();
            let results: Vec<SampleResult> = cells
                .par_iter()
                .map(|&(i, p, m)| {
                    let (spec, s, g) = &crops[i];
                    evaluate_cell(data_root, config, spec, s, g, p, m)
                })
                .collect();
            if config.strict {
                if let Some(r) = results.iter().find(|r| r.status != SampleStatus::Ok) {
                    let SampleStatus::Failed { reason } = &r.status else {
                        unreachable!()
                    };
                    return Err(HarnessError::Data {
                        path: data_root.join("masks").join(&r.sample_id),
                        reason: reason.clone(),
                    });
                }
            }
            rows.extend(results);
        }
    }
    Ok(ConsensusReport::from_rows(rows, skipped, config.tails_k))
}
