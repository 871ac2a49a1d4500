//! Monte Carlo harness: AMSE comparison of estimators and empirical
//! coverage of the credible bands.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{estimate_from_periodogram, point_estimate, ti_denoise, EstimateConfig};
use crate::error::{Error, Result};
use crate::lsw::{correct_spectrum, raw_wavelet_periodogram, simulate_lsw_with, Ews};
use crate::wavelet::{InnerProductMatrix, WaveletFilter};

/// Mean over replicates of the mean squared error over all cells.
pub fn amse(estimates: &[Vec<Vec<f64>>], truth: &Ews) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::Empty("estimates".into()));
    }
    let per: Vec<f64> = estimates.iter().map(|e| mse(e, truth)).collect::<Result<_>>()?;
    Ok(per.iter().sum::<f64>() / per.len() as f64)
}

fn mse(estimate: &[Vec<f64>], truth: &Ews) -> Result<f64> {
    if estimate.len() != truth.levels() || estimate.iter().any(|r| r.len() != truth.len()) {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", truth.levels(), truth.len()),
            found: format!("{} rows", estimate.len()),
        });
    }
    let n = (truth.levels() * truth.len()) as f64;
    Ok(estimate
        .iter()
        .zip(truth.rows())
        .flat_map(|(e, t)| e.iter().zip(t).map(|(a, b)| (a - b) * (a - b)))
        .sum::<f64>()
        / n)
}

fn clip(m: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    m.into_iter().map(|r| r.into_iter().map(|v| v.max(0.0)).collect()).collect()
}

/// Replicate stream `index` of the master seed.
fn replicate_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Bayesian shrinkage of the Haar-Fisz periodogram.
    #[serde(rename = "H-F")]
    HaarFisz,
    /// Translation-invariant denoising baseline.
    #[serde(rename = "TI-D")]
    TiDenoise,
    /// Bias-corrected raw periodogram `A⁻¹ I`, unclipped.
    #[serde(rename = "raw")]
    Raw,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::HaarFisz => "H-F",
            Method::TiDenoise => "TI-D",
            Method::Raw => "raw",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchmarkConfig {
    pub replicates: usize,
    pub spectrum: Ews,
    /// Synthesis (= analysis) wavelet.
    pub analysis: WaveletFilter,
    pub smoothing: Vec<WaveletFilter>,
    pub spins: usize,
    pub seed: u64,
}

impl BenchmarkConfig {
    pub const MIN_REPLICATES: usize = 10;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub method: Method,
    /// Smoothing filter name, `None` for the raw periodogram.
    pub smoothing: Option<String>,
    pub amse: f64,
    pub std_error: f64,
    pub replicates: usize,
    /// Wall-clock seconds spent in this estimator, summed over replicates.
    pub runtime_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub rows: Vec<BenchmarkRow>,
    pub seed: u64,
    pub spins: usize,
    pub analysis: String,
}

impl BenchmarkReport {
    pub fn row(&self, method: Method, smoothing: Option<&str>) -> Option<&BenchmarkRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.smoothing.as_deref() == smoothing)
    }
}

struct ReplicateErrors {
    raw: (f64, f64),
    per_filter: Vec<[(f64, f64); 2]>,
}

fn run_replicate(cfg: &BenchmarkConfig, a: &InnerProductMatrix, index: usize) -> Result<ReplicateErrors> {
    let x = simulate_lsw_with(&cfg.spectrum, &cfg.analysis, &mut replicate_rng(cfg.seed, index))?;
    let p = raw_wavelet_periodogram(&x, &cfg.analysis)?;
    let t = Instant::now();
    let raw = mse(&correct_spectrum(&p.values, a)?, &cfg.spectrum)?;
    let raw_time = t.elapsed().as_secs_f64();
    let per_filter = cfg
        .smoothing
        .iter()
        .map(|f| {
            let ecfg = EstimateConfig {
                analysis: cfg.analysis.clone(),
                smoothing: f.clone(),
                spins: cfg.spins,
                ..Default::default()
            };
            let t = Instant::now();
            let hf = clip(point_estimate(&p, a, &ecfg)?);
            let hf_err = (mse(&hf, &cfg.spectrum)?, t.elapsed().as_secs_f64());
            let t = Instant::now();
            let ti = clip(ti_denoise(&p, f, a)?);
            let ti_err = (mse(&ti, &cfg.spectrum)?, t.elapsed().as_secs_f64());
            Ok([hf_err, ti_err])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ReplicateErrors {
        raw: (raw, raw_time),
        per_filter,
    })
}

fn summarize(method: Method, smoothing: Option<String>, values: &[(f64, f64)]) -> BenchmarkRow {
    let n = values.len() as f64;
    let mean = values.iter().map(|v| v.0).sum::<f64>() / n;
    let var = values.iter().map(|v| (v.0 - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    BenchmarkRow {
        method,
        smoothing,
        amse: mean,
        std_error: (var / n).sqrt(),
        replicates: values.len(),
        runtime_secs: values.iter().map(|v| v.1).sum(),
    }
}

/// Simulates `replicates` series from the spectrum and scores the
/// Haar-Fisz and TI estimators for every smoothing filter, plus the raw
/// corrected periodogram. Both smoothed estimators are scored as reported,
/// i.e. clipped at zero. Deterministic in `seed`; replicate `r` uses its
/// own RNG stream.
pub fn benchmark(cfg: &BenchmarkConfig) -> Result<BenchmarkReport> {
    if cfg.replicates < BenchmarkConfig::MIN_REPLICATES {
        return Err(Error::InvalidParameter(format!(
            "benchmark needs at least {} replicates, got {}",
            BenchmarkConfig::MIN_REPLICATES,
            cfg.replicates
        )));
    }
    if cfg.smoothing.is_empty() {
        return Err(Error::Empty("smoothing filter grid".into()));
    }
    let a = InnerProductMatrix::new(&cfg.analysis, cfg.spectrum.levels())?;
    let results: Vec<ReplicateErrors> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            run_replicate(cfg, &a, r).map_err(|e| Error::Replicate {
                index: r,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(2 * cfg.smoothing.len() + 1);
    for (i, f) in cfg.smoothing.iter().enumerate() {
        for (m, method) in [Method::HaarFisz, Method::TiDenoise].into_iter().enumerate() {
            let values: Vec<(f64, f64)> = results.iter().map(|r| r.per_filter[i][m]).collect();
            rows.push(summarize(method, Some(f.name()), &values));
        }
    }
    let raw: Vec<(f64, f64)> = results.iter().map(|r| r.raw).collect();
    rows.push(summarize(Method::Raw, None, &raw));
    Ok(BenchmarkReport {
        rows,
        seed: cfg.seed,
        spins: cfg.spins,
        analysis: cfg.analysis.name(),
    })
}

/// Empirical coverage of the credible bands, per credible level and scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub levels: Vec<f64>,
    /// `coverage[i][j - 1]`: fraction of (replicate, location) cells at
    /// scale `j` whose band at `levels[i]` contains the truth.
    pub coverage: Vec<Vec<f64>>,
    pub replicates: usize,
    pub seed: u64,
}

impl CoverageReport {
    pub fn at(&self, level: f64) -> Option<&[f64]> {
        self.levels
            .iter()
            .position(|l| (l - level).abs() < 1e-12)
            .map(|i| self.coverage[i].as_slice())
    }
}

/// Simulates `replicates` series from `truth`, estimates each with `cfg`
/// (credible levels included) and counts band hits. Replicate `r` simulates
/// from stream `r` of `seed` and samples with seed `seed + r + 1`.
pub fn coverage_check(replicates: usize, truth: &Ews, cfg: &EstimateConfig, seed: u64) -> Result<CoverageReport> {
    if replicates == 0 {
        return Err(Error::InvalidParameter("coverage needs at least one replicate".into()));
    }
    let a = InnerProductMatrix::new(&cfg.analysis, truth.levels())?;
    let hits: Vec<Vec<Vec<usize>>> = (0..replicates)
        .map(|r| {
            let run = || -> Result<Vec<Vec<usize>>> {
                let x = simulate_lsw_with(truth, &cfg.analysis, &mut replicate_rng(seed, r))?;
                let p = raw_wavelet_periodogram(&x, &cfg.analysis)?;
                let rcfg = EstimateConfig {
                    seed: seed.wrapping_add(r as u64 + 1),
                    ..cfg.clone()
                };
                let est = estimate_from_periodogram(&p, &a, &rcfg)?;
                Ok(est
                    .bands
                    .iter()
                    .map(|b| {
                        (0..truth.levels())
                            .map(|j| {
                                (0..truth.len())
                                    .filter(|&k| {
                                        let t = truth.rows()[j][k];
                                        b.lower[j][k] <= t && t <= b.upper[j][k]
                                    })
                                    .count()
                            })
                            .collect()
                    })
                    .collect())
            };
            run().map_err(|e| Error::Replicate {
                index: r,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    let cells = (replicates * truth.len()) as f64;
    let coverage = (0..cfg.credible_levels.len())
        .map(|i| {
            (0..truth.levels())
                .map(|j| hits.iter().map(|h| h[i][j]).sum::<usize>() as f64 / cells)
                .collect()
        })
        .collect();
    Ok(CoverageReport {
        levels: cfg.credible_levels.clone(),
        coverage,
        replicates,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amse_basics() {
        let truth = Ews::from_fn(32, |j, z| j as f64 * z).unwrap();
        let exact = truth.rows().to_vec();
        assert_eq!(amse(std::slice::from_ref(&exact), &truth).unwrap(), 0.0);
        let plus: Vec<Vec<f64>> = exact.iter().map(|r| r.iter().map(|v| v + 1.0).collect()).collect();
        assert!((amse(std::slice::from_ref(&plus), &truth).unwrap() - 1.0).abs() < 1e-15);
        let a = amse(&[plus.clone(), exact.clone()], &truth).unwrap();
        let b = amse(&[exact, plus], &truth).unwrap();
        assert_eq!(a, b);
        assert!(amse(&[], &truth).is_err());
    }
}
