use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use super::{HarnessError, SampleResult, SampleStatus, SkippedTile};
use crate::mask::PromptConfig;
use crate::metrics::{ConsensusScores, DegenerateFlag};
use crate::raster::TileSpec;
use crate::stats::{mean, quantile_sorted, std_dev};

/// Quantile levels reported for every metric.
pub const QUANTILES: [f64; 7] = [0.01, 0.05, 0.25, 0.50, 0.75, 0.95, 0.99];

const SAMPLE_COLUMNS: [&str; 20] = [
    "sample_id",
    "parent_tile_id",
    "aoi_side",
    "origin_row",
    "origin_col",
    "pps_percent",
    "mmra_percent",
    "pps",
    "mmra",
    "status",
    "mask_count",
    "unassigned_fraction",
    "fmi",
    "ari",
    "nmi",
    "v_measure",
    "homogeneity",
    "completeness",
    "degenerate",
    "error",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSummary {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    /// Values at [`QUANTILES`], linear interpolation.
    pub quantiles: [f64; 7],
}

/// Summary of one (aoi side, pps%, mmra%) cell over its successful samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub aoi_side: usize,
    pub pps_percent: f64,
    pub mmra_percent: f64,
    pub count: usize,
    pub failed: usize,
    /// Keyed by metric name; empty when `count` is 0.
    pub metrics: BTreeMap<String, MetricSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEntry {
    pub sample_id: String,
    pub aoi_side: usize,
    pub pps_percent: f64,
    pub mmra_percent: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricTails {
    pub top: Vec<TailEntry>,
    pub bottom: Vec<TailEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tails {
    pub k: usize,
    pub metrics: BTreeMap<String, MetricTails>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusReport {
    pub rows: Vec<SampleResult>,
    pub skipped: Vec<SkippedTile>,
    pub aggregates: Vec<Aggregate>,
    pub tails: Tails,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Both,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "both" => Ok(ReportFormat::Both),
            other => Err(format!("unknown report format {other:?} (csv, json, both)")),
        }
    }
}

impl ConsensusReport {
    /// Builds aggregates and tails; `tails_k` is capped at the number of
    /// successful rows.
    pub fn from_rows(rows: Vec<SampleResult>, skipped: Vec<SkippedTile>, tails_k: usize) -> Self {
        let aggregates = aggregate_rows(&rows);
        let ok = rows.iter().filter(|r| r.scores.is_some()).count();
        let k = tails_k.min(ok);
        let metrics = ConsensusScores::METRICS
            .iter()
            .map(|m| {
                let (top, bottom) =
                    extract_tails(&rows, m, k).expect("k is capped at the row count");
                (m.to_string(), MetricTails { top, bottom })
            })
            .collect();
        ConsensusReport {
            rows,
            skipped,
            aggregates,
            tails: Tails { k, metrics },
        }
    }
}

fn summarize(values: &[f64]) -> Option<MetricSummary> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut quantiles = [0.0; 7];
    for (q, slot) in QUANTILES.iter().zip(quantiles.iter_mut()) {
        *slot = quantile_sorted(&sorted, *q)?;
    }
    Some(MetricSummary {
        mean: mean(values)?,
        std: std_dev(values)?,
        quantiles,
    })
}

/// Groups rows by (aoi side, pps%, mmra%), ascending, and summarizes each
/// metric over the successful rows in row order.
pub fn aggregate_rows(rows: &[SampleResult]) -> Vec<Aggregate> {
    type Key = (usize, f64, f64);
    let mut groups: Vec<(Key, Vec<&SampleResult>)> = Vec::new();
    for r in rows {
        let key = (r.tile.aoi_side, r.prompt.pps_percent, r.prompt.mmra_percent);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, g)) => g.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    groups.sort_by(|(a, _), (b, _)| {
        a.0.cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.total_cmp(&b.2))
    });
    groups
        .into_iter()
        .map(|((aoi_side, pps_percent, mmra_percent), group)| {
            let scored: Vec<&ConsensusScores> =
                group.iter().filter_map(|r| r.scores.as_ref()).collect();
            let metrics = ConsensusScores::METRICS
                .iter()
                .filter_map(|m| {
                    let values: Vec<f64> = scored.iter().filter_map(|s| s.metric(m)).collect();
                    summarize(&values).map(|s| (m.to_string(), s))
                })
                .collect();
            Aggregate {
                aoi_side,
                pps_percent,
                mmra_percent,
                count: scored.len(),
                failed: group.len() - scored.len(),
                metrics,
            }
        })
        .collect()
}

/// Top `k` (descending) and bottom `k` (ascending) successful rows by
/// `metric`. Ties break on sample id, then pps%, then mmra%.
pub fn extract_tails(
    rows: &[SampleResult],
    metric: &str,
    k: usize,
) -> Result<(Vec<TailEntry>, Vec<TailEntry>), HarnessError> {
    if !ConsensusScores::METRICS.contains(&metric) {
        return Err(HarnessError::Config(format!("unknown metric {metric:?}")));
    }
    let mut entries: Vec<TailEntry> = rows
        .iter()
        .filter_map(|r| {
            Some(TailEntry {
                sample_id: r.sample_id.clone(),
                aoi_side: r.tile.aoi_side,
                pps_percent: r.prompt.pps_percent,
                mmra_percent: r.prompt.mmra_percent,
                score: r.scores.as_ref()?.metric(metric)?,
            })
        })
        .collect();
    if k > entries.len() {
        return Err(HarnessError::Config(format!(
            "cannot take {k} tail entries from {} scored samples",
            entries.len()
        )));
    }
    let tie = |a: &TailEntry, b: &TailEntry| {
        a.sample_id
            .cmp(&b.sample_id)
            .then(a.pps_percent.total_cmp(&b.pps_percent))
            .then(a.mmra_percent.total_cmp(&b.mmra_percent))
    };
    entries.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| tie(a, b)));
    let top = entries[..k].to_vec();
    entries.sort_by(|a, b| a.score.total_cmp(&b.score).then_with(|| tie(a, b)));
    let bottom = entries[..k].to_vec();
    Ok((top, bottom))
}

fn f6(x: f64) -> String {
    format!("{x:.6}")
}

fn f12(x: f64) -> String {
    format!("{x:.12}")
}

fn sample_record(r: &SampleResult) -> Vec<String> {
    let (status, error) = match &r.status {
        SampleStatus::Ok => ("ok", String::new()),
        SampleStatus::Failed { reason } => ("failed", reason.clone()),
    };
    let mut rec = vec![
        r.sample_id.clone(),
        r.tile.parent_tile_id.clone(),
        r.tile.aoi_side.to_string(),
        r.tile.origin_row.to_string(),
        r.tile.origin_col.to_string(),
        r.prompt.pps_percent.to_string(),
        r.prompt.mmra_percent.to_string(),
        r.prompt.pps.to_string(),
        r.prompt.mmra.to_string(),
        status.to_string(),
        r.mask_count.to_string(),
        f6(r.unassigned_fraction),
    ];
    match &r.scores {
        Some(s) => {
            rec.extend(s.values().iter().map(|v| f6(*v)));
            let flags: Vec<String> = s.degenerate.iter().map(|f| f.to_string()).collect();
            rec.push(flags.join(";"));
        }
        None => rec.extend(std::iter::repeat_n(String::new(), 7)),
    }
    rec.push(error);
    rec
}

fn csv_error(path: &Path) -> impl FnOnce(csv::Error) -> HarnessError + '_ {
    move |source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn write_csv(
    path: &Path,
    header: &[&str],
    records: impl Iterator<Item = Vec<String>>,
) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error(path))?;
    w.write_record(header).map_err(csv_error(path))?;
    for rec in records {
        w.write_record(&rec).map_err(csv_error(path))?;
    }
    w.flush().map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(value).expect("report values serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Serialize)]
struct SampleDoc<'a> {
    sample_id: &'a str,
    tile: &'a TileSpec,
    prompt: &'a PromptConfig,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
    mask_count: usize,
    unassigned_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    scores: Option<&'a ConsensusScores>,
}

#[derive(Serialize)]
struct SkippedDoc<'a> {
    tile_id: &'a str,
    reason: &'a str,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    samples: Vec<SampleDoc<'a>>,
    skipped: Vec<SkippedDoc<'a>>,
    aggregates: &'a [Aggregate],
    tails: &'a Tails,
}

/// Writes the report into `out_dir` and returns the files written. CSV
/// output is `samples.csv`, `samples_long.csv`, `aggregates.csv`,
/// `skipped.csv` and `tails.json`; JSON output is `report.json`. Output is
/// byte-identical for identical inputs.
pub fn emit_report(
    report: &ConsensusReport,
    out_dir: &Path,
    format: ReportFormat,
) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(out_dir).map_err(|source| HarnessError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    if matches!(format, ReportFormat::Csv | ReportFormat::Both) {
        let path = out_dir.join("samples.csv");
        write_csv(
            &path,
            &SAMPLE_COLUMNS,
            report.rows.iter().map(sample_record),
        )?;
        written.push(path);

        let path = out_dir.join("samples_long.csv");
        let long = report.rows.iter().flat_map(|r| {
            r.scores.iter().flat_map(move |s| {
                ConsensusScores::METRICS
                    .iter()
                    .zip(s.values())
                    .map(move |(m, v)| {
                        vec![
                            r.sample_id.clone(),
                            r.tile.aoi_side.to_string(),
                            r.prompt.pps_percent.to_string(),
                            r.prompt.mmra_percent.to_string(),
                            m.to_string(),
                            f6(v),
                        ]
                    })
            })
        });
        write_csv(
            &path,
            &[
                "sample_id",
                "aoi_side",
                "pps_percent",
                "mmra_percent",
                "metric",
                "value",
            ],
            long,
        )?;
        written.push(path);

        let path = out_dir.join("aggregates.csv");
        let mut header = vec![
            "aoi_side",
            "pps_percent",
            "mmra_percent",
            "metric",
            "count",
            "failed",
            "mean",
            "std",
        ];
        header.extend(["q01", "q05", "q25", "q50", "q75", "q95", "q99"]);
        let aggs = report.aggregates.iter().flat_map(|a| {
            a.metrics.iter().map(move |(m, s)| {
                let mut rec = vec![
                    a.aoi_side.to_string(),
                    a.pps_percent.to_string(),
                    a.mmra_percent.to_string(),
                    m.clone(),
                    a.count.to_string(),
                    a.failed.to_string(),
                    f12(s.mean),
                    f12(s.std),
                ];
                rec.extend(s.quantiles.iter().map(|q| f12(*q)));
                rec
            })
        });
        write_csv(&path, &header, aggs)?;
        written.push(path);

        let path = out_dir.join("skipped.csv");
        let skipped = report
            .skipped
            .iter()
            .map(|s| vec![s.tile_id.clone(), s.reason.clone()]);
        write_csv(&path, &["tile_id", "reason"], skipped)?;
        written.push(path);

        let path = out_dir.join("tails.json");
        write_json(&path, &report.tails)?;
        written.push(path);
    }
    if matches!(format, ReportFormat::Json | ReportFormat::Both) {
        let doc = ReportDoc {
            samples: report
                .rows
                .iter()
                .map(|r| {
                    let (status, error) = match &r.status {
                        SampleStatus::Ok => ("ok", None),
                        SampleStatus::Failed { reason } => ("failed", Some(reason.as_str())),
                    };
                    SampleDoc {
                        sample_id: &r.sample_id,
                        tile: &r.tile,
                        prompt: &r.prompt,
                        status,
                        error,
                        mask_count: r.mask_count,
                        unassigned_fraction: r.unassigned_fraction,
                        scores: r.scores.as_ref(),
                    }
                })
                .collect(),
            skipped: report
                .skipped
                .iter()
                .map(|s| SkippedDoc {
                    tile_id: &s.tile_id,
                    reason: &s.reason,
                })
                .collect(),
            aggregates: &report.aggregates,
            tails: &report.tails,
        };
        let path = out_dir.join("report.json");
        write_json(&path, &doc)?;
        written.push(path);
    }
    Ok(written)
}

/// Reads rows back from a `samples.csv` written by [`emit_report`].
/// Timing is not stored, so `elapsed` is zero.
pub fn read_samples_csv(path: &Path) -> Result<Vec<SampleResult>, HarnessError> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_error(path))?;
    let headers = reader.headers().map_err(csv_error(path))?.clone();
    if headers.iter().ne(SAMPLE_COLUMNS.iter().copied()) {
        return Err(HarnessError::Data {
            path: path.to_path_buf(),
            reason: "unexpected samples.csv header".into(),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_error(path))?;
        let bad = |what: &str| HarnessError::Data {
            path: path.to_path_buf(),
            reason: format!("row {}: bad {what}", i + 1),
        };
        let field = |idx: usize| rec.get(idx).unwrap_or("");
        fn num<T: std::str::FromStr>(s: &str) -> Option<T> {
            s.parse().ok()
        }
        let tile = TileSpec {
            parent_tile_id: field(1).to_string(),
            aoi_side: num(field(2)).ok_or_else(|| bad("aoi_side"))?,
            side: num(field(2)).ok_or_else(|| bad("aoi_side"))?,
            origin_row: num(field(3)).ok_or_else(|| bad("origin_row"))?,
            origin_col: num(field(4)).ok_or_else(|| bad("origin_col"))?,
        };
        let prompt = PromptConfig {
            pps_percent: num(field(5)).ok_or_else(|| bad("pps_percent"))?,
            mmra_percent: num(field(6)).ok_or_else(|| bad("mmra_percent"))?,
            pps: num(field(7)).ok_or_else(|| bad("pps"))?,
            mmra: num(field(8)).ok_or_else(|| bad("mmra"))?,
        };
        let (status, scores) = match field(9) {
            "ok" => {
                let mut v = [0.0; 6];
                for (j, slot) in v.iter_mut().enumerate() {
                    *slot = num(field(12 + j)).ok_or_else(|| bad(ConsensusScores::METRICS[j]))?;
                }
                let degenerate = field(18)
                    .split(';')
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<DegenerateFlag>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad("degenerate"))?;
                let scores = ConsensusScores {
                    fmi: v[0],
                    ari: v[1],
                    nmi: v[2],
                    v_measure: v[3],
                    homogeneity: v[4],
                    completeness: v[5],
                    degenerate,
                };
                (SampleStatus::Ok, Some(scores))
            }
            "failed" => (
                SampleStatus::Failed {
                    reason: field(19).to_string(),
                },
                None,
            ),
            _ => return Err(bad("status")),
        };
        rows.push(SampleResult {
            tile,
            sample_id: field(0).to_string(),
            prompt,
            status,
            scores,
            mask_count: num(field(10)).ok_or_else(|| bad("mask_count"))?,
            unassigned_fraction: num(field(11)).ok_or_else(|| bad("unassigned_fraction"))?,
            elapsed: Duration::ZERO,
        });
    }
    Ok(rows)
}
