use std::path::Path;

use fieldseg::harness::synthetic::{generate, three_field_scene, write_scene, Layout, SceneSpec};
use fieldseg::harness::{
    aggregate_rows, emit_report, read_samples_csv, run_experiment, ExperimentConfig, HarnessError,
    ReportFormat, SampleStatus, SegmenterKind,
};
use fieldseg::mask::{write_maskset_file, BooleanMask, MaskSet, PromptConfig};
use fieldseg::raster::{MultispectralStack, TileSpec};

fn oracle_config() -> ExperimentConfig {
    ExperimentConfig {
        aoi_factors: vec![1],
        pps_percents: vec![0.1],
        mmra_percents: vec![0.0],
        samples_per_set: 300,
        segmenter: SegmenterKind::ColorOracle,
        ..ExperimentConfig::default()
    }
}

fn voronoi(id: &str, seed: u64) -> fieldseg::harness::synthetic::Scene {
    generate(&SceneSpec {
        id: id.into(),
        side: 40,
        layout: Layout::Voronoi {
            cells: 5,
            classes: 3,
        },
        roads: None,
        seed,
    })
}

#[test]
fn single_cell_report_aggregates_equal_row() {
    let dir = tempfile::tempdir().unwrap();
    write_scene(dir.path(), &three_field_scene("t0", 30, false)).unwrap();
    let report = run_experiment(&oracle_config(), dir.path()).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.aggregates.len(), 1);
    let row = report.rows[0].scores.as_ref().unwrap();
    for (name, summary) in &report.aggregates[0].metrics {
        let v = row.metric(name).unwrap();
        assert_eq!(summary.mean, v);
        assert_eq!(summary.std, 0.0);
        assert!(summary.quantiles.iter().all(|q| *q == v));
    }
    assert_eq!(row.fmi, 1.0);
}

#[test]
fn sweep_cardinality() {
    let dir = tempfile::tempdir().unwrap();
    for i in 0..10 {
        write_scene(dir.path(), &voronoi(&format!("v{i}"), i)).unwrap();
    }
    let config = ExperimentConfig {
        pps_percents: vec![0.05, 0.1],
        mmra_percents: vec![0.0, 0.01],
        ..oracle_config()
    };
    let report = run_experiment(&config, dir.path()).unwrap();
    assert_eq!(report.rows.len(), 40);
    assert_eq!(report.aggregates.len(), 4);
    assert!(report
        .aggregates
        .iter()
        .all(|a| a.count == 10 && a.failed == 0));
    assert_eq!(aggregate_rows(&report.rows), report.aggregates);
}

#[test]
fn rows_follow_canonical_order() {
    let dir = tempfile::tempdir().unwrap();
    for i in 0..3 {
        write_scene(dir.path(), &voronoi(&format!("v{i}"), i)).unwrap();
    }
    let config = ExperimentConfig {
        aoi_factors: vec![1, 2],
        pps_percents: vec![0.1, 0.05],
        ..oracle_config()
    };
    let report = run_experiment(&config, dir.path()).unwrap();
    // factor 1: 3 tiles; factor 2: 4 sub-tiles each
    assert_eq!(report.rows.len(), (3 + 12) * 2);
    let keys: Vec<(usize, TileSpec, usize)> = report
        .rows
        .iter()
        .map(|r| {
            let p = config
                .pps_percents
                .iter()
                .position(|p| *p == r.prompt.pps_percent)
                .unwrap();
            (usize::MAX - r.tile.side, r.tile.clone(), p)
        })
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for i in 0..4 {
        write_scene(dir.path(), &voronoi(&format!("v{i}"), i)).unwrap();
    }
    let config = ExperimentConfig {
        aoi_factors: vec![1, 2],
        pps_percents: vec![0.05, 0.1],
        mmra_percents: vec![0.0, 0.01],
        samples_per_set: 7,
        ..oracle_config()
    };
    let emit = |out: &Path| {
        let report = run_experiment(&config, dir.path()).unwrap();
        emit_report(&report, out, ReportFormat::Both).unwrap()
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let files = emit(a.path());
    emit(b.path());
    for f in files {
        let name = f.file_name().unwrap();
        assert_eq!(
            std::fs::read(&f).unwrap(),
            std::fs::read(b.path().join(name)).unwrap()
        );
    }
}

#[test]
fn missing_maskset_fails_row_and_strict_aborts() {
    let dir = tempfile::tempdir().unwrap();
    write_scene(dir.path(), &three_field_scene("t0", 20, false)).unwrap();
    write_scene(dir.path(), &three_field_scene("t1", 20, false)).unwrap();
    let config = ExperimentConfig {
        segmenter: SegmenterKind::External,
        ..oracle_config()
    };
    // one valid external mask set: the whole tile as one mask
    let prompt = PromptConfig::resolve(20, 0.1, 0.0);
    let set = MaskSet::new(
        "t0_s20_r0_c0",
        20,
        20,
        prompt,
        vec![BooleanMask::from_bitmap(20, 20, &[true; 400], 0.9)],
    )
    .unwrap();
    let path = fieldseg::harness::external_mask_path(dir.path(), "t0_s20_r0_c0", &prompt);
    assert!(path.ends_with("masks/t0_s20_r0_c0/pps2_mmra0.json"));
    write_maskset_file(&set, &path).unwrap();

    let report = run_experiment(&config, dir.path()).unwrap();
    assert_eq!(report.rows.len(), 2);
    assert_eq!(report.rows[0].status, SampleStatus::Ok);
    assert_eq!(report.rows[0].mask_count, 1);
    match &report.rows[1].status {
        SampleStatus::Failed { reason } => assert!(reason.contains("t1_s20_r0_c0")),
        other => panic!("expected failure, got {other:?}"),
    }
    assert_eq!(
        (report.aggregates[0].count, report.aggregates[0].failed),
        (1, 1)
    );

    let strict = ExperimentConfig {
        strict: true,
        ..config
    };
    let err = run_experiment(&strict, dir.path()).unwrap_err();
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn corrupt_ground_truth_aborts_with_path() {
    let dir = tempfile::tempdir().unwrap();
    write_scene(dir.path(), &three_field_scene("t0", 20, false)).unwrap();
    let gt = dir.path().join("labels/t0.lmap");
    std::fs::write(&gt, b"LMAPgarbage").unwrap();
    let err = run_experiment(&oracle_config(), dir.path()).unwrap_err();
    assert!(
        matches!(&err, HarnessError::Data { path, .. } if path == &gt),
        "{err}"
    );
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn cloudy_and_excluded_tiles_are_skipped() {
    let dir = tempfile::tempdir().unwrap();
    write_scene(dir.path(), &three_field_scene("clear", 20, false)).unwrap();
    write_scene(dir.path(), &three_field_scene("listed", 20, false)).unwrap();
    let mut cloudy = three_field_scene("cloudy", 20, false);
    cloudy
        .snapshot
        .pixels
        .iter_mut()
        .take(3 * 100)
        .for_each(|p| *p = 250);
    write_scene(dir.path(), &cloudy).unwrap();
    std::fs::write(dir.path().join("exclude.txt"), "# manual\nlisted\n").unwrap();
    let config = ExperimentConfig {
        exclusion_list: Some("exclude.txt".into()),
        ..oracle_config()
    };
    let report = run_experiment(&config, dir.path()).unwrap();
    let skipped: Vec<&str> = report.skipped.iter().map(|s| s.tile_id.as_str()).collect();
    assert_eq!(skipped, ["cloudy", "listed"]);
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.rows[0].tile.parent_tile_id, "clear");
}

#[test]
fn stack_input_matches_snapshot_input() {
    // A stack whose red/green/blue bands carry the scene colours and whose
    // NDVI peaks at t = 1.
    let scene = three_field_scene("s", 24, true);
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir_all(dir.path().join("stacks")).unwrap();
    std::fs::create_dir_all(dir.path().join("labels")).unwrap();
    scene
        .ground_truth
        .write(&dir.path().join("labels/s.lmap"))
        .unwrap();
    let (h, w) = (24, 24);
    let mut data = Vec::new();
    for t in 0..2 {
        for px in scene.snapshot.pixels.chunks_exact(3) {
            let nir = if t == 1 { 0.9 } else { 0.1 };
            data.extend([
                px[2] as f32 / 255.0,
                px[1] as f32 / 255.0,
                px[0] as f32 / 255.0,
                nir,
            ]);
        }
    }
    let names = ["B2", "B3", "B4", "B8"].map(String::from).to_vec();
    let stack = MultispectralStack::new("s", [2, h, w, 4], names, data).unwrap();
    stack.write_msst(&dir.path().join("stacks/s.msst")).unwrap();
    let config = ExperimentConfig {
        stretch: fieldseg::raster::StretchPolicy::MinMax,
        ..oracle_config()
    };
    let report = run_experiment(&config, dir.path()).unwrap();
    assert_eq!(report.rows.len(), 1);
    let snap = fieldseg::harness::load_tile_snapshot(dir.path(), "s", &config)
        .unwrap()
        .unwrap();
    assert_eq!(snap.source_timestep, 1);

    let png_dir = tempfile::tempdir().unwrap();
    write_scene(png_dir.path(), &scene).unwrap();
    let from_png = run_experiment(&config, png_dir.path()).unwrap();
    assert_eq!(report.rows[0].scores, from_png.rows[0].scores);
}

#[test]
fn csv_round_trip_recomputes_aggregates() {
    let dir = tempfile::tempdir().unwrap();
    for i in 0..5 {
        write_scene(dir.path(), &voronoi(&format!("v{i}"), 100 + i)).unwrap();
    }
    let config = ExperimentConfig {
        aoi_factors: vec![1, 2],
        pps_percents: vec![0.05, 0.1],
        ..oracle_config()
    };
    let report = run_experiment(&config, dir.path()).unwrap();
    let out = tempfile::tempdir().unwrap();
    emit_report(&report, out.path(), ReportFormat::Csv).unwrap();
    let rows = read_samples_csv(&out.path().join("samples.csv")).unwrap();
    assert_eq!(rows.len(), report.rows.len());
    assert_eq!(aggregate_rows(&rows), report.aggregates);
}

#[test]
fn empty_report_has_header_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir_all(dir.path().join("labels")).unwrap();
    let report = run_experiment(&oracle_config(), dir.path()).unwrap();
    assert!(report.rows.is_empty());
    let out = tempfile::tempdir().unwrap();
    emit_report(&report, out.path(), ReportFormat::Csv).unwrap();
    let text = std::fs::read_to_string(out.path().join("samples.csv")).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("sample_id,parent_tile_id,aoi_side"));
}
