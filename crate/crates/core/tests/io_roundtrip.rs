use std::path::Path;

use lswspec::estimator::{BenchmarkReport, BenchmarkRow, CoverageReport, Method};
use lswspec::io::{self, Meta};
use lswspec::lsw::{simulate_lsw, test_spectrum, Ews};
use lswspec::wavelet::WaveletFilter;
use lswspec::{estimate_ews, EstimateConfig};
use proptest::prelude::*;

fn meta() -> Meta {
    vec![("seed".into(), "17".into()), ("filter".into(), "EP1".into())]
}

fn awkward(v: f64) -> f64 {
    // values whose decimal forms need all 17 digits
    v * std::f64::consts::PI / 3.0 + 1e-300 * v
}

#[test]
fn series() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x.csv");
    let x: Vec<f64> = (0..64).map(|k| awkward(k as f64 - 31.5)).collect();
    io::write_series(&p, &x, &meta()).unwrap();
    assert_eq!(io::read_series(&p).unwrap(), (x, meta()));
}

#[test]
fn dense_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.csv");
    let rows: Vec<Vec<f64>> = (0..4).map(|j| (0..16).map(|k| awkward((j * 16 + k) as f64)).collect()).collect();
    io::write_dense(&p, &rows, &meta()).unwrap();
    assert_eq!(io::read_dense(&p).unwrap(), (rows, meta()));
}

#[test]
fn ews_both_layouts() {
    let dir = tempfile::tempdir().unwrap();
    let ews = Ews::from_fn(32, |j, z| awkward(j as f64 + z)).unwrap();
    let long = dir.path().join("long.csv");
    let dense = dir.path().join("dense.csv");
    io::write_ews_long(&long, &ews, &meta()).unwrap();
    io::write_ews_dense(&dense, &ews, &meta()).unwrap();
    assert_eq!(io::read_ews(&long).unwrap(), (ews.clone(), meta()));
    assert_eq!(io::read_ews(&dense).unwrap(), (ews, meta()));
}

fn small_estimate() -> lswspec::EwsEstimate {
    let haar = WaveletFilter::haar();
    let x = simulate_lsw(&test_spectrum(64).unwrap(), &haar, 71).unwrap();
    let cfg = EstimateConfig {
        spins: 2,
        samples: 100,
        credible_levels: vec![0.5, 0.9, 0.975],
        ..Default::default()
    };
    estimate_ews(&x, &cfg).unwrap()
}

#[test]
fn estimate_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let est = small_estimate();
    let json = dir.path().join("e.json");
    io::write_estimate_json(&json, &est, &meta()).unwrap();
    let (back, config) = io::read_estimate_json(&json).unwrap();
    assert_eq!(back, est);
    let mut sorted = meta();
    sorted.sort();
    assert_eq!(config, sorted);

    let csv = dir.path().join("e.csv");
    io::write_estimate_csv(&csv, &est, &meta()).unwrap();
    let flat = io::read_estimate_csv(&csv).unwrap();
    assert_eq!(flat.mean, est.mean);
    assert_eq!(flat.bands, est.bands);
    assert_eq!(flat.meta, meta());
}

fn report() -> BenchmarkReport {
    let row = |method, smoothing: Option<&str>, amse: f64| BenchmarkRow {
        method,
        smoothing: smoothing.map(str::to_string),
        amse,
        std_error: amse / 7.0,
        replicates: 12,
        runtime_secs: amse * 3.0,
    };
    BenchmarkReport {
        rows: vec![
            row(Method::TiDenoise, Some("EP1"), awkward(1.0)),
            row(Method::HaarFisz, Some("EP1"), awkward(0.5)),
            row(Method::TiDenoise, Some("LA6"), awkward(0.9)),
            row(Method::HaarFisz, Some("LA6"), awkward(0.4)),
            row(Method::Raw, None, awkward(3.0)),
        ],
        seed: 606,
        spins: 20,
        analysis: "EP1".into(),
    }
}

fn bench_meta() -> Meta {
    vec![
        ("seed".into(), "606".into()),
        ("spins".into(), "20".into()),
        ("analysis".into(), "EP1".into()),
    ]
}

#[test]
fn benchmark_rows_and_timing() {
    let dir = tempfile::tempdir().unwrap();
    let r = report();
    let rows = dir.path().join("rows.csv");
    let timing = dir.path().join("rows.timing.csv");
    io::write_text(&rows, &io::format_benchmark_rows(&r, &bench_meta())).unwrap();
    io::write_text(&timing, &io::format_benchmark_timing(&r)).unwrap();
    let (back, m) = io::read_benchmark_rows(&rows, Some(&timing)).unwrap();
    assert_eq!(back, r);
    assert_eq!(m, bench_meta());

    let (untimed, _) = io::read_benchmark_rows(&rows, None).unwrap();
    assert!(untimed.rows.iter().all(|row| row.runtime_secs == 0.0));
}

#[test]
fn benchmark_table() {
    let dir = tempfile::tempdir().unwrap();
    let r = report();
    let p = dir.path().join("table.csv");
    io::write_text(&p, &io::format_benchmark_table(&r, &bench_meta())).unwrap();
    let (cells, m) = io::read_benchmark_table(&p).unwrap();
    let per_filter: Vec<_> = r.rows.iter().filter(|row| row.smoothing.is_some()).collect();
    assert_eq!(cells.len(), per_filter.len());
    for row in per_filter {
        let key = (row.smoothing.clone().unwrap(), row.method.label().to_string());
        assert_eq!(cells[&key], row.amse);
    }
    let raw = r.row(Method::Raw, None).unwrap().amse.to_string();
    assert_eq!(io::meta_value(&m, "raw_amse"), Some(raw.as_str()));
}

#[test]
fn coverage() {
    let dir = tempfile::tempdir().unwrap();
    let report = CoverageReport {
        levels: vec![0.5, 0.9],
        coverage: vec![(0..6).map(|j| awkward(j as f64) / 10.0).collect(), vec![0.9; 6]],
        replicates: 50,
        seed: 708,
    };
    let meta: Meta = vec![("replicates".into(), "50".into()), ("seed".into(), "708".into())];
    let p = dir.path().join("cov.csv");
    io::write_coverage(&p, &report, &meta).unwrap();
    assert_eq!(io::read_coverage(&p).unwrap(), (report, meta));
}

fn read_back(path: &Path, x: &[f64]) -> Vec<f64> {
    io::write_series(path, x, &Meta::new()).unwrap();
    io::read_series(path).unwrap().0
}

proptest! {
    #[test]
    fn any_finite_series_is_lossless(x in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 1..200)) {
        let dir = tempfile::tempdir().unwrap();
        prop_assert_eq!(read_back(&dir.path().join("x.csv"), &x), x);
    }
}
