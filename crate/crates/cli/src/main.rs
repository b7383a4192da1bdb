//! `fieldseg` command-line front end.
//!
//! Every subcommand prints a JSON summary on stdout and writes any files
//! under `--out-dir`. Exit codes: 0 success, 2 configuration error, 3 data
//! error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fieldseg::harness::{
    color_oracle_segmenter, emit_report, extract_tails, read_samples_csv, run_experiment,
    ExperimentConfig, HarnessError, ReportFormat,
};
use fieldseg::mask::{
    consolidate, filter_mmra, prompt_grid, read_maskset, write_maskset_file, LabelMap, MaskSet,
    PromptConfig,
};
use fieldseg::metrics::score_label_maps;
use fieldseg::raster::{
    compute_ndvi, extract_rgb_snapshot, sample_select, screen_clouds, select_max_ndvi_timestep,
    tile_image, BandTriplet, MultispectralStack, RasterError, RgbSnapshot,
};
use fieldseg::vectorize::{build_shape_map, to_geojson, Provenance};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "fieldseg",
    version,
    about = "Evaluate class-agnostic field masks against crop label rasters"
)]
struct Cli {
    /// Experiment config (TOML, or JSON with a .json extension).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for written files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Abort on the first failed sample.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

/// Prompt density, either in pixels or as a fraction of the side.
#[derive(Args)]
struct Density {
    #[arg(long, conflicts_with = "pps_percent")]
    pps: Option<usize>,
    #[arg(long)]
    pps_percent: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    mmra_percent: f64,
}

impl Density {
    fn resolve(&self, side: usize) -> Result<PromptConfig, HarnessError> {
        let mmra = PromptConfig::resolve(side, 1.0, self.mmra_percent);
        match (self.pps, self.pps_percent) {
            (Some(0), _) => Err(HarnessError::Config("--pps must be >= 1".into())),
            (Some(pps), _) => Ok(PromptConfig {
                pps,
                pps_percent: pps as f64 / side as f64,
                ..mmra
            }),
            (None, Some(p)) if p > 0.0 && p <= 1.0 => {
                Ok(PromptConfig::resolve(side, p, self.mmra_percent))
            }
            (None, Some(p)) => Err(HarnessError::Config(format!(
                "--pps-percent {p} outside (0, 1]"
            ))),
            (None, None) => Err(HarnessError::Config(
                "one of --pps or --pps-percent is required".into(),
            )),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate a multispectral stack and report its NDVI series.
    Ingest {
        #[arg(long)]
        stack: PathBuf,
    },
    /// Extract an RGB snapshot (PNG) from a stack at peak NDVI or a given timestep.
    Snapshot {
        #[arg(long)]
        stack: PathBuf,
        #[arg(long)]
        timestep: Option<usize>,
    },
    /// List (optionally sample) sub-tile windows of a parent tile.
    Tile {
        /// Parent raster; its size and file stem are used.
        #[arg(long, required_unless_present_all = ["height", "width"])]
        image: Option<PathBuf>,
        #[arg(long)]
        height: Option<usize>,
        #[arg(long)]
        width: Option<usize>,
        #[arg(long, default_value = "tile")]
        parent: String,
        #[arg(long)]
        factor: usize,
        /// Defaults to the config stride policy.
        #[arg(long)]
        stride: Option<usize>,
        /// Draw this many windows with the seed.
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Print the prompt grid for a square image.
    Prompts {
        #[arg(long)]
        side: usize,
        #[command(flatten)]
        density: Density,
    },
    /// Segment an RGB image with the colour-oracle segmenter.
    SegmentOracle {
        #[arg(long)]
        image: PathBuf,
        #[command(flatten)]
        density: Density,
        /// Defaults to the config colour tolerance.
        #[arg(long)]
        tolerance: Option<u8>,
    },
    /// Filter and consolidate a mask set into a label map.
    Consolidate {
        #[arg(long)]
        masks: PathBuf,
        /// Minimum region area in pixels; defaults to the mask set's own.
        #[arg(long)]
        mmra: Option<u64>,
    },
    /// Score a predicted label map against ground truth.
    Score {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        /// Drop pixels whose predicted label is 0.
        #[arg(long)]
        exclude_background: bool,
    },
    /// Run the full sweep over a data root and write the report.
    Sweep {
        #[arg(long)]
        data_root: PathBuf,
        #[arg(long, default_value = "both")]
        format: ReportFormat,
    },
    /// Top and bottom samples of a metric from a samples.csv.
    Tails {
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, default_value = "fmi")]
        metric: String,
        #[arg(long, default_value_t = 5)]
        k: usize,
    },
    /// Convert a label map into GeoJSON field polygons.
    Vectorize {
        #[arg(long)]
        labels: PathBuf,
        #[arg(long, default_value_t = 1)]
        min_area: usize,
        /// Douglas-Peucker tolerance in pixels; 0 keeps exact outlines.
        #[arg(long, default_value_t = 0.0)]
        simplify: f64,
        /// Affine pixel-to-map transform `a,b,c,d,e,f`, recorded as metadata.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        transform: Option<Vec<f64>>,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn ensure_dir(dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.strict |= cli.strict;
    Ok(config)
}

fn ndvi_for(
    stack: &MultispectralStack,
    config: &ExperimentConfig,
) -> Result<(BandTriplet, Vec<Option<f64>>), HarnessError> {
    let b = &config.bands;
    let bands = BandTriplet::from_names(stack, &b.red, &b.green, &b.blue)?;
    let nir = stack
        .band_index(&b.nir)
        .ok_or_else(|| RasterError::BandConfig(format!("no band named {:?}", b.nir)))?;
    let series = compute_ndvi(stack, nir, bands.red_index, false)?;
    Ok((bands, series.values))
}

fn run(cli: &Cli) -> Result<Value, HarnessError> {
    let config = load_config(cli)?;
    let out = &cli.out_dir;
    Ok(match &cli.command {
        Command::Ingest { stack } => {
            let stack = MultispectralStack::read_msst(stack)?;
            let (_, ndvi) = ndvi_for(&stack, &config)?;
            let t_max =
                select_max_ndvi_timestep(&fieldseg::raster::NdviSeries::from_means(ndvi.clone()))
                    .ok();
            json!({
                "tile_id": stack.tile_id(),
                "timesteps": stack.timesteps(),
                "height": stack.height(),
                "width": stack.width(),
                "bands": stack.band_names(),
                "ndvi_means": ndvi,
                "t_max": t_max,
            })
        }
        Command::Snapshot { stack, timestep } => {
            let stack = MultispectralStack::read_msst(stack)?;
            let (bands, ndvi) = ndvi_for(&stack, &config)?;
            let t = match timestep {
                Some(t) => *t,
                None => select_max_ndvi_timestep(&fieldseg::raster::NdviSeries::from_means(ndvi))?,
            };
            let snap = extract_rgb_snapshot(&stack, t, bands, config.stretch)?;
            ensure_dir(out)?;
            let path = out.join(format!("{}.png", snap.tile_id));
            snap.write_png(&path)?;
            let screen = screen_clouds(&snap, &config.screen);
            json!({
                "path": path,
                "timestep": t,
                "cloud_score": screen.score,
                "usable": screen.usable,
            })
        }
        Command::Tile {
            image,
            height,
            width,
            parent,
            factor,
            stride,
            sample,
        } => {
            let (h, w, parent) = match image {
                Some(path) => {
                    let (h, w) = if path.extension().is_some_and(|e| e == "lmap") {
                        LabelMap::read(path)?.dims()
                    } else {
                        let s = RgbSnapshot::read_png(path)?;
                        (s.height, s.width)
                    };
                    (h, w, file_stem(path))
                }
                None => (height.unwrap_or(0), width.unwrap_or(0), parent.clone()),
            };
            if *factor == 0 {
                return Err(HarnessError::Config("--factor must be >= 1".into()));
            }
            let side = h.min(w) / factor;
            let stride = stride.unwrap_or_else(|| config.stride.stride(side.max(1)));
            let mut tiles = tile_image(&parent, h, w, *factor, stride)?;
            if let Some(n) = sample {
                tiles = sample_select(&tiles, *n, config.seed)?;
            }
            let list: Vec<Value> = tiles
                .iter()
                .map(|t| {
                    json!({
                        "id": t.id(),
                        "origin_row": t.origin_row,
                        "origin_col": t.origin_col,
                        "side": t.side,
                    })
                })
                .collect();
            json!({ "parent": parent, "side": side, "stride": stride, "tiles": list })
        }
        Command::Prompts { side, density } => {
            let prompt = density.resolve(*side)?;
            json!({
                "pps": prompt.pps,
                "count": prompt.prompt_count(),
                "points": prompt_grid(*side, prompt.pps),
            })
        }
        Command::SegmentOracle {
            image,
            density,
            tolerance,
        } => {
            let snap = RgbSnapshot::read_png(image)?;
            let prompt = density.resolve(snap.height.min(snap.width))?;
            let set =
                color_oracle_segmenter(&snap, &prompt, tolerance.unwrap_or(config.color_tolerance));
            let path = out
                .join(&set.image_id)
                .join(format!("pps{}_mmra{}.json", prompt.pps, prompt.mmra));
            write_maskset_file(&set, &path)?;
            json!({ "path": path, "masks": set.masks.len(), "pps": prompt.pps, "mmra": prompt.mmra })
        }
        Command::Consolidate { masks, mmra } => {
            let set = read_maskset(masks)?;
            let mmra = mmra.unwrap_or(set.generator.mmra);
            let filtered = MaskSet {
                masks: set.masks.iter().map(|m| filter_mmra(m, mmra)).collect(),
                ..set
            };
            let map = consolidate(&filtered)?;
            ensure_dir(out)?;
            let path = out.join(format!("{}.lmap", filtered.image_id));
            map.write(&path)?;
            let labels = map.labels.iter().copied().max().unwrap_or(0);
            let unassigned = map.labels.iter().filter(|&&l| l == 0).count();
            json!({
                "path": path,
                "labels": labels,
                "mmra": mmra,
                "unassigned_fraction": unassigned as f64 / map.labels.len() as f64,
            })
        }
        Command::Score {
            gt,
            pred,
            exclude_background,
        } => {
            let gt = LabelMap::read(gt)?;
            let pred = LabelMap::read(pred)?;
            let scores =
                score_label_maps(&gt, &pred, *exclude_background || config.exclude_background)?;
            serde_json::to_value(scores).expect("scores serialize")
        }
        Command::Sweep { data_root, format } => {
            let report = run_experiment(&config, data_root)?;
            let files = emit_report(&report, out, *format)?;
            let failed = report.rows.iter().filter(|r| r.scores.is_none()).count();
            json!({
                "rows": report.rows.len(),
                "failed": failed,
                "skipped_tiles": report.skipped.len(),
                "aggregates": report.aggregates.len(),
                "files": files,
            })
        }
        Command::Tails { samples, metric, k } => {
            let rows = read_samples_csv(samples)?;
            let (top, bottom) = extract_tails(&rows, metric, *k)?;
            json!({ "metric": metric, "k": k, "top": top, "bottom": bottom })
        }
        Command::Vectorize {
            labels,
            min_area,
            simplify,
            transform,
        } => {
            let map = LabelMap::read(labels)?;
            let image_id = file_stem(labels);
            let transform = match transform.as_deref() {
                None => None,
                Some(&[a, b, c, d, e, f]) => Some([a, b, c, d, e, f]),
                Some(t) => {
                    return Err(HarnessError::Config(format!(
                        "--transform needs 6 values, got {}",
                        t.len()
                    )))
                }
            };
            let mut shape = build_shape_map(&map, *min_area).with_provenance(Provenance {
                image_id: image_id.clone(),
                prompt_config: None,
                transform,
            });
            if *simplify > 0.0 {
                shape = shape.simplified(*simplify);
            }
            ensure_dir(out)?;
            let path = out.join(format!("{image_id}.geojson"));
            let text = serde_json::to_string(&to_geojson(&shape)).expect("geojson serializes");
            std::fs::write(&path, text + "\n").map_err(io_err(&path))?;
            json!({ "path": path, "polygons": shape.polygons.len() })
        }
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            log::debug!("{e:?}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
