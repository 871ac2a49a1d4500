//! CSV and JSON artifacts, each with a matching reader.
//!
//! CSV files may start with `# key=value` lines carrying the run
//! configuration; readers return them as [`Meta`]. Blank lines and other
//! `#` lines are ignored. Floats are written in shortest round-trip form, so
//! every writer/reader pair is lossless.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{Band, BenchmarkReport, BenchmarkRow, CoverageReport, EstimateMeta, EwsEstimate, Method};
use crate::lsw::Ews;
use crate::wavelet::{Family, WaveletFilter};

/// Ordered `key=value` configuration embedded in artifacts.
pub type Meta = Vec<(String, String)>;

/// Series writes and reads use this column name when a header is present.
pub const SERIES_HEADER: &str = "value";
pub const EWS_LONG_HEADER: &str = "scale,location,value";

struct Line {
    number: usize,
    text: String,
}

struct CsvFile {
    path: PathBuf,
    meta: Meta,
    lines: Vec<Line>,
}

impl CsvFile {
    fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut meta = Meta::new();
        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let t = raw.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(c) = t.strip_prefix('#') {
                if let Some((k, v)) = c.trim().split_once('=') {
                    meta.push((k.trim().to_string(), v.trim().to_string()));
                }
                continue;
            }
            lines.push(Line {
                number: i + 1,
                text: t.to_string(),
            });
        }
        Ok(Self {
            path: path.to_path_buf(),
            meta,
            lines,
        })
    }

    fn error(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line,
            message: message.into(),
        }
    }

    fn number(&self, line: &Line, field: &str) -> Result<f64> {
        let v: f64 = field
            .trim()
            .parse()
            .map_err(|_| self.error(line.number, format!("`{}` is not a number", field.trim())))?;
        if !v.is_finite() {
            return Err(self.error(line.number, format!("non-finite value `{}`", field.trim())));
        }
        Ok(v)
    }

    fn index(&self, line: &Line, field: &str) -> Result<usize> {
        field
            .trim()
            .parse()
            .map_err(|_| self.error(line.number, format!("`{}` is not a nonnegative integer", field.trim())))
    }

    fn fields<'a>(&self, line: &'a Line, expected: usize) -> Result<Vec<&'a str>> {
        let f: Vec<&str> = line.text.split(',').collect();
        if f.len() != expected {
            return Err(self.error(line.number, format!("expected {expected} fields, found {}", f.len())));
        }
        Ok(f)
    }

    fn header<'a>(&'a self, expected: &str) -> Result<&'a [Line]> {
        match self.lines.split_first() {
            Some((h, rest)) if normalize(&h.text) == expected => Ok(rest),
            Some((h, _)) => Err(self.error(h.number, format!("expected header `{expected}`, found `{}`", h.text))),
            None => Err(Error::Empty(self.path.display().to_string())),
        }
    }
}

fn normalize(header: &str) -> String {
    header.split(',').map(str::trim).collect::<Vec<_>>().join(",")
}

fn meta_block(meta: &Meta) -> String {
    let mut s = String::new();
    for (k, v) in meta {
        let _ = writeln!(s, "# {k}={v}");
    }
    s
}

fn join(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

/// Writes `contents` to `path`, or to standard output when `path` is `-`.
pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if path == Path::new("-") {
        use std::io::Write;
        std::io::stdout().write_all(contents.as_bytes())?;
        Ok(())
    } else {
        Ok(fs::write(path, contents)?)
    }
}

/// Looks up `key` in embedded metadata.
pub fn meta_value<'a>(meta: &'a Meta, key: &str) -> Option<&'a str> {
    meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

// ---------------------------------------------------------------- series

/// Reads a series: one number per line with an optional non-numeric header.
pub fn read_series(path: &Path) -> Result<(Vec<f64>, Meta)> {
    let f = CsvFile::read(path)?;
    let mut body = f.lines.as_slice();
    if let Some(first) = body.first() {
        if first.text.parse::<f64>().is_err() && !first.text.contains(',') {
            body = &body[1..];
        }
    }
    let values = body
        .iter()
        .map(|l| {
            let fields = f.fields(l, 1)?;
            f.number(l, fields[0])
        })
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(Error::Empty(format!("series {}", path.display())));
    }
    Ok((values, f.meta))
}

pub fn format_series(x: &[f64], meta: &Meta) -> String {
    let mut s = meta_block(meta);
    s.push_str(SERIES_HEADER);
    s.push('\n');
    for v in x {
        let _ = writeln!(s, "{v}");
    }
    s
}

pub fn write_series(path: &Path, x: &[f64], meta: &Meta) -> Result<()> {
    write_text(path, &format_series(x, meta))
}

// ---------------------------------------------------------- J×T matrices

/// Dense `J × T` CSV: row `j - 1` holds scale `j`, no header.
pub fn format_dense(rows: &[Vec<f64>], meta: &Meta) -> String {
    let mut s = meta_block(meta);
    for r in rows {
        s.push_str(&join(r));
        s.push('\n');
    }
    s
}

fn parse_dense(f: &CsvFile) -> Result<Vec<Vec<f64>>> {
    let width = f.lines.first().map(|l| l.text.split(',').count()).unwrap_or(0);
    f.lines
        .iter()
        .map(|l| f.fields(l, width)?.into_iter().map(|v| f.number(l, v)).collect())
        .collect()
}

/// Reads a dense `J × T` matrix such as a periodogram.
pub fn read_dense(path: &Path) -> Result<(Vec<Vec<f64>>, Meta)> {
    let f = CsvFile::read(path)?;
    let rows = parse_dense(&f)?;
    if rows.is_empty() {
        return Err(Error::Empty(path.display().to_string()));
    }
    Ok((rows, f.meta))
}

pub fn write_dense(path: &Path, rows: &[Vec<f64>], meta: &Meta) -> Result<()> {
    write_text(path, &format_dense(rows, meta))
}

// ------------------------------------------------------------------- EWS

/// Long-form EWS CSV with header `scale,location,value`; scales are
/// 1-based, locations 0-based.
pub fn format_ews_long(ews: &Ews, meta: &Meta) -> String {
    let mut s = meta_block(meta);
    s.push_str(EWS_LONG_HEADER);
    s.push('\n');
    for (j, row) in ews.rows().iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            let _ = writeln!(s, "{},{k},{v}", j + 1);
        }
    }
    s
}

pub fn write_ews_long(path: &Path, ews: &Ews, meta: &Meta) -> Result<()> {
    write_text(path, &format_ews_long(ews, meta))
}

pub fn write_ews_dense(path: &Path, ews: &Ews, meta: &Meta) -> Result<()> {
    write_dense(path, ews.rows(), meta)
}

/// Reads an EWS in either long (`scale,location,value` header) or dense
/// form. Long form must list every cell exactly once.
pub fn read_ews(path: &Path) -> Result<(Ews, Meta)> {
    let f = CsvFile::read(path)?;
    let first = f.lines.first().ok_or_else(|| Error::Empty(path.display().to_string()))?;
    let rows = if normalize(&first.text) == EWS_LONG_HEADER {
        parse_ews_long(&f)?
    } else {
        parse_dense(&f)?
    };
    let ews = Ews::new(rows).map_err(|e| f.error(first.number, e.to_string()))?;
    Ok((ews, f.meta))
}

fn parse_ews_long(f: &CsvFile) -> Result<Vec<Vec<f64>>> {
    let body = f.header(EWS_LONG_HEADER)?;
    let mut cells = BTreeMap::new();
    for l in body {
        let v = f.fields(l, 3)?;
        let (j, k, value) = (f.index(l, v[0])?, f.index(l, v[1])?, f.number(l, v[2])?);
        if j == 0 {
            return Err(f.error(l.number, "scales are numbered from 1"));
        }
        if cells.insert((j, k), value).is_some() {
            return Err(f.error(l.number, format!("duplicate cell ({j}, {k})")));
        }
    }
    let len = cells.len();
    let levels = cells.keys().map(|c| c.0).max().unwrap_or(0);
    let width = len.checked_div(levels).unwrap_or(0);
    let last = body.last().map(|l| l.number).unwrap_or(0);
    if levels == 0 || width * levels != len || width != 1 << levels {
        return Err(f.error(last, format!("{len} cells do not form a {levels} x 2^{levels} grid")));
    }
    let mut rows = vec![vec![0.0; width]; levels];
    for ((j, k), v) in cells {
        if k >= width {
            return Err(f.error(last, format!("location {k} outside 0..{width}")));
        }
        rows[j - 1][k] = v;
    }
    Ok(rows)
}

// -------------------------------------------------------------- estimate

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandPair {
    pub lo: Vec<Vec<f64>>,
    pub hi: Vec<Vec<f64>>,
}

/// JSON form of an [`EwsEstimate`]; bands are keyed `p50`, `p90`, ….
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateDocument {
    pub meta: EstimateMeta,
    pub config: BTreeMap<String, String>,
    pub scales: Vec<usize>,
    pub locations: Vec<usize>,
    pub mean: Vec<Vec<f64>>,
    pub mean_preclip: Vec<Vec<f64>>,
    pub sample_mean: Vec<Vec<f64>>,
    pub bands: BTreeMap<String, BandPair>,
}

/// Band key for a credible level, e.g. `0.9 → "p90"`.
pub fn band_key(level: f64) -> String {
    let pct = level * 100.0;
    if (pct - pct.round()).abs() < 1e-9 {
        format!("p{}", pct.round() as u64)
    } else {
        format!("p{pct}")
    }
}

fn key_level(key: &str) -> Option<f64> {
    key.strip_prefix('p')?.parse::<f64>().ok().map(|p| p / 100.0)
}

impl EstimateDocument {
    pub fn new(est: &EwsEstimate, config: &Meta) -> Self {
        Self {
            meta: est.meta.clone(),
            config: config.iter().cloned().collect(),
            scales: (1..=est.levels()).collect(),
            locations: (0..est.len()).collect(),
            mean: est.mean.clone(),
            mean_preclip: est.mean_preclip.clone(),
            sample_mean: est.sample_mean.clone(),
            bands: est
                .bands
                .iter()
                .map(|b| {
                    (
                        band_key(b.level),
                        BandPair {
                            lo: b.lower.clone(),
                            hi: b.upper.clone(),
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn into_estimate(self) -> Result<EwsEstimate> {
        let mut bands = self
            .bands
            .into_iter()
            .map(|(k, b)| {
                let level = key_level(&k).ok_or_else(|| Error::InvalidParameter(format!("bad band key `{k}`")))?;
                Ok(Band {
                    level,
                    lower: b.lo,
                    upper: b.hi,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        bands.sort_by(|a, b| a.level.total_cmp(&b.level));
        Ok(EwsEstimate {
            mean: self.mean,
            mean_preclip: self.mean_preclip,
            sample_mean: self.sample_mean,
            bands,
            meta: self.meta,
        })
    }
}

pub fn format_estimate_json(est: &EwsEstimate, config: &Meta) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&EstimateDocument::new(est, config))?;
    s.push('\n');
    Ok(s)
}

pub fn write_estimate_json(path: &Path, est: &EwsEstimate, config: &Meta) -> Result<()> {
    write_text(path, &format_estimate_json(est, config)?)
}

pub fn read_estimate_json(path: &Path) -> Result<(EwsEstimate, Meta)> {
    let doc: EstimateDocument = serde_json::from_str(&fs::read_to_string(path)?)?;
    let config = doc.config.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    Ok((doc.into_estimate()?, config))
}

fn estimate_header(levels: &[f64]) -> String {
    let mut h = String::from("scale,location,mean");
    for &l in levels {
        let p = band_key(l);
        let _ = write!(h, ",lo{0},hi{0}", &p[1..]);
    }
    h
}

/// Flat plotting CSV: `scale,location,mean,lo50,hi50,lo90,hi90`.
pub fn format_estimate_csv(est: &EwsEstimate, config: &Meta) -> String {
    let levels: Vec<f64> = est.bands.iter().map(|b| b.level).collect();
    let mut s = meta_block(config);
    s.push_str(&estimate_header(&levels));
    s.push('\n');
    for j in 0..est.levels() {
        for k in 0..est.len() {
            let _ = write!(s, "{},{k},{}", j + 1, est.mean[j][k]);
            for b in &est.bands {
                let _ = write!(s, ",{},{}", b.lower[j][k], b.upper[j][k]);
            }
            s.push('\n');
        }
    }
    s
}

pub fn write_estimate_csv(path: &Path, est: &EwsEstimate, config: &Meta) -> Result<()> {
    write_text(path, &format_estimate_csv(est, config))
}

/// Contents of the flat estimate CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatEstimate {
    pub mean: Vec<Vec<f64>>,
    pub bands: Vec<Band>,
    pub meta: Meta,
}

pub fn read_estimate_csv(path: &Path) -> Result<FlatEstimate> {
    let f = CsvFile::read(path)?;
    let head = f.lines.first().ok_or_else(|| Error::Empty(path.display().to_string()))?;
    let names: Vec<&str> = head.text.split(',').map(str::trim).collect();
    if names.len() < 3 || names[..3] != ["scale", "location", "mean"] || names.len().is_multiple_of(2) {
        return Err(f.error(head.number, format!("unexpected header `{}`", head.text)));
    }
    let levels = names[3..]
        .chunks(2)
        .map(|c| {
            c[0].strip_prefix("lo")
                .and_then(|p| key_level(&format!("p{p}")))
                .ok_or_else(|| f.error(head.number, format!("bad band column `{}`", c[0])))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut cells = BTreeMap::new();
    for l in &f.lines[1..] {
        let v = f.fields(l, names.len())?;
        let key = (f.index(l, v[0])?, f.index(l, v[1])?);
        let values = v[2..].iter().map(|x| f.number(l, x)).collect::<Result<Vec<_>>>()?;
        if key.0 == 0 || cells.insert(key, values).is_some() {
            return Err(f.error(l.number, format!("invalid or duplicate cell {key:?}")));
        }
    }
    let levels_j = cells.keys().map(|c| c.0).max().unwrap_or(0);
    let len = cells.len() / levels_j.max(1);
    if levels_j == 0 || len * levels_j != cells.len() || cells.keys().any(|c| c.1 >= len) {
        return Err(f.error(head.number, "cells do not form a complete grid"));
    }
    let grid = || vec![vec![0.0; len]; levels_j];
    let mut mean = grid();
    let mut bands: Vec<Band> = levels
        .iter()
        .map(|&level| Band {
            level,
            lower: grid(),
            upper: grid(),
        })
        .collect();
    for ((j, k), v) in cells {
        mean[j - 1][k] = v[0];
        for (i, b) in bands.iter_mut().enumerate() {
            b.lower[j - 1][k] = v[1 + 2 * i];
            b.upper[j - 1][k] = v[2 + 2 * i];
        }
    }
    Ok(FlatEstimate { mean, bands, meta: f.meta })
}

// ------------------------------------------------------------- benchmark

/// Column order of the AMSE table CSV.
const TABLE_COLUMNS: [(Family, Method); 4] = [
    (Family::ExtremalPhase, Method::TiDenoise),
    (Family::ExtremalPhase, Method::HaarFisz),
    (Family::LeastAsymmetric, Method::TiDenoise),
    (Family::LeastAsymmetric, Method::HaarFisz),
];

/// AMSE table: one row per number of
/// vanishing moments, columns `EP_TI-D,EP_H-F,LA_TI-D,LA_H-F`; cells for
/// filters not in the run are empty. The raw-periodogram AMSE goes in the
/// metadata as `raw_amse`.
pub fn format_benchmark_table(report: &BenchmarkReport, meta: &Meta) -> String {
    let mut meta = meta.clone();
    if let Some(raw) = report.row(Method::Raw, None) {
        meta.push(("raw_amse".into(), raw.amse.to_string()));
    }
    let mut s = meta_block(&meta);
    s.push_str("vm");
    for (fam, m) in TABLE_COLUMNS {
        let _ = write!(s, ",{}_{}", fam.tag(), m.label());
    }
    s.push('\n');
    let max_vm = Family::ExtremalPhase
        .supported_moments()
        .end()
        .max(Family::LeastAsymmetric.supported_moments().end())
        .to_owned();
    for vm in 1..=max_vm {
        let cells: Vec<String> = TABLE_COLUMNS
            .iter()
            .map(|&(fam, m)| {
                WaveletFilter::new(fam, vm)
                    .ok()
                    .and_then(|f| report.row(m, Some(&f.name())))
                    .map(|r| r.amse.to_string())
                    .unwrap_or_default()
            })
            .collect();
        if cells.iter().any(|c| !c.is_empty()) {
            let _ = writeln!(s, "{vm},{}", cells.join(","));
        }
    }
    s
}

/// `(filter name, method label) → AMSE`.
pub type AmseTable = BTreeMap<(String, String), f64>;

/// Reads the AMSE table CSV.
pub fn read_benchmark_table(path: &Path) -> Result<(AmseTable, Meta)> {
    let f = CsvFile::read(path)?;
    let expected = std::iter::once("vm".to_string())
        .chain(TABLE_COLUMNS.iter().map(|&(fam, m)| format!("{}_{}", fam.tag(), m.label())))
        .collect::<Vec<_>>()
        .join(",");
    let mut out = BTreeMap::new();
    for l in f.header(&expected)? {
        let v = f.fields(l, 5)?;
        let vm = f.index(l, v[0])?;
        for (&(fam, m), cell) in TABLE_COLUMNS.iter().zip(&v[1..]) {
            if !cell.trim().is_empty() {
                out.insert((format!("{}{vm}", fam.tag()), m.label().to_string()), f.number(l, cell)?);
            }
        }
    }
    Ok((out, f.meta))
}

pub const BENCHMARK_ROWS_HEADER: &str = "method,smoothing,amse,std_error,replicates";
pub const TIMING_HEADER: &str = "method,smoothing,runtime_secs";

fn smoothing_cell(r: &BenchmarkRow) -> &str {
    r.smoothing.as_deref().unwrap_or("")
}

/// Every benchmark row, raw periodogram included (runtimes excluded).
pub fn format_benchmark_rows(report: &BenchmarkReport, meta: &Meta) -> String {
    let mut s = meta_block(meta);
    s.push_str(BENCHMARK_ROWS_HEADER);
    s.push('\n');
    for r in &report.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.method.label(),
            smoothing_cell(r),
            r.amse,
            r.std_error,
            r.replicates
        );
    }
    s
}

/// Wall-clock runtimes, kept apart so the other artifacts are reproducible.
pub fn format_benchmark_timing(report: &BenchmarkReport) -> String {
    let mut s = String::from(TIMING_HEADER);
    s.push('\n');
    for r in &report.rows {
        let _ = writeln!(s, "{},{},{}", r.method.label(), smoothing_cell(r), r.runtime_secs);
    }
    s
}

fn parse_method(f: &CsvFile, l: &Line, s: &str) -> Result<Method> {
    [Method::HaarFisz, Method::TiDenoise, Method::Raw]
        .into_iter()
        .find(|m| m.label() == s.trim())
        .ok_or_else(|| f.error(l.number, format!("unknown method `{s}`")))
}

/// Reads the per-row benchmark CSV; runtimes are read from `timing` when
/// given and zero otherwise. `seed`, `spins` and `analysis` come from the
/// embedded metadata when present.
pub fn read_benchmark_rows(path: &Path, timing: Option<&Path>) -> Result<(BenchmarkReport, Meta)> {
    let f = CsvFile::read(path)?;
    let mut rows = Vec::new();
    for l in f.header(BENCHMARK_ROWS_HEADER)? {
        let v = f.fields(l, 5)?;
        let smoothing = Some(v[1].trim()).filter(|s| !s.is_empty()).map(str::to_string);
        rows.push(BenchmarkRow {
            method: parse_method(&f, l, v[0])?,
            smoothing,
            amse: f.number(l, v[2])?,
            std_error: f.number(l, v[3])?,
            replicates: f.index(l, v[4])?,
            runtime_secs: 0.0,
        });
    }
    if let Some(tp) = timing {
        let t = CsvFile::read(tp)?;
        for l in t.header(TIMING_HEADER)? {
            let v = t.fields(l, 3)?;
            let m = parse_method(&t, l, v[0])?;
            let sm = Some(v[1].trim()).filter(|s| !s.is_empty());
            let secs = t.number(l, v[2])?;
            if let Some(r) = rows.iter_mut().find(|r| r.method == m && r.smoothing.as_deref() == sm) {
                r.runtime_secs = secs;
            }
        }
    }
    let parsed = |key: &str| meta_value(&f.meta, key).and_then(|v| v.parse().ok());
    let report = BenchmarkReport {
        rows,
        seed: parsed("seed").unwrap_or(0),
        spins: parsed("spins").unwrap_or(0) as usize,
        analysis: meta_value(&f.meta, "analysis").unwrap_or_default().to_string(),
    };
    Ok((report, f.meta))
}

// -------------------------------------------------------------- coverage

/// Per-scale coverage: `scale,cov50,cov90`.
pub fn format_coverage(report: &CoverageReport, meta: &Meta) -> String {
    let mut s = meta_block(meta);
    s.push_str("scale");
    for &l in &report.levels {
        let _ = write!(s, ",cov{}", &band_key(l)[1..]);
    }
    s.push('\n');
    let scales = report.coverage.first().map(Vec::len).unwrap_or(0);
    for j in 0..scales {
        let _ = write!(s, "{}", j + 1);
        for c in &report.coverage {
            let _ = write!(s, ",{}", c[j]);
        }
        s.push('\n');
    }
    s
}

pub fn read_coverage(path: &Path) -> Result<(CoverageReport, Meta)> {
    let f = CsvFile::read(path)?;
    let head = f.lines.first().ok_or_else(|| Error::Empty(path.display().to_string()))?;
    let names: Vec<&str> = head.text.split(',').map(str::trim).collect();
    if names.first() != Some(&"scale") {
        return Err(f.error(head.number, format!("unexpected header `{}`", head.text)));
    }
    let levels = names[1..]
        .iter()
        .map(|n| {
            n.strip_prefix("cov")
                .and_then(|p| key_level(&format!("p{p}")))
                .ok_or_else(|| f.error(head.number, format!("bad column `{n}`")))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut coverage = vec![Vec::new(); levels.len()];
    for (i, l) in f.lines[1..].iter().enumerate() {
        let v = f.fields(l, names.len())?;
        if f.index(l, v[0])? != i + 1 {
            return Err(f.error(l.number, format!("expected scale {}", i + 1)));
        }
        for (c, x) in coverage.iter_mut().zip(&v[1..]) {
            c.push(f.number(l, x)?);
        }
    }
    let parsed = |key: &str| meta_value(&f.meta, key).and_then(|v| v.parse().ok());
    let report = CoverageReport {
        levels,
        coverage,
        replicates: parsed("replicates").unwrap_or(0) as usize,
        seed: parsed("seed").unwrap_or(0),
    };
    Ok((report, f.meta))
}

pub fn write_coverage(path: &Path, report: &CoverageReport, meta: &Meta) -> Result<()> {
    write_text(path, &format_coverage(report, meta))
}
