//! The full estimation pipeline with cycle spinning and posterior credible
//! bands, the TI-denoising baseline, and the simulation harness.
//!
//! Per spin `s` and periodogram scale `j`, with `I_j` circularly shifted by
//! `s·T/spins`:
//!
//! ```text
//! I_j → Haar-Fisz → DWT → MMLE fit → posterior mean ─┐
//!                                  └→ posterior draws ┴→ IDWT → inverse H-F → unshift
//! ```
//!
//! Point estimates are averaged over spins and then bias-corrected with
//! `A⁻¹`. Each posterior realization is pushed through the same inverse
//! chain and corrected on its own; bands are empirical quantiles of the
//! corrected realizations.

mod bench;
mod ti;

pub use bench::{amse, benchmark, coverage_check, BenchmarkConfig, BenchmarkReport, BenchmarkRow, CoverageReport, Method};
pub use ti::{ti_denoise, ti_denoise_baseline, ti_denoise_row};

use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haar_fisz::{haar_fisz_forward, haar_fisz_inverse, haar_fisz_inverse_clamped};
use crate::lsw::{raw_wavelet_periodogram, RawWaveletPeriodogram};
use crate::shrink::{fit_mmle, HyperParams, POOLED_LEVELS};
use crate::wavelet::{dwt, idwt, DwtCoefficients, InnerProductMatrix, WaveletFilter};

pub const DEFAULT_SPINS: usize = 20;
pub const DEFAULT_SAMPLES: usize = 1000;
pub const MIN_SAMPLES: usize = 100;
pub const DEFAULT_CREDIBLE_LEVELS: [f64; 2] = [0.5, 0.9];

/// How wavelet coefficients of the Haar-Fisz periodogram are shrunk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shrinkage {
    /// Posterior mean under the fitted spike-and-slab prior.
    Bayes,
    /// No shrinkage; the pipeline reduces to `A⁻¹ I`.
    Identity,
}

/// How a posterior draw whose implied Fisz ratios leave `[-1, 1]` is
/// mapped back through the inverse Haar-Fisz transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DrawInversion {
    /// Clip the offending ratios (the nearest consistent vector).
    Clamp,
    /// Reject the whole draw and redraw; fails once rejections outnumber
    /// the draws requested for a (spin, scale) unit.
    Strict,
}

#[derive(Debug, Clone)]
pub struct EstimateConfig {
    pub analysis: WaveletFilter,
    pub smoothing: WaveletFilter,
    pub spins: usize,
    pub samples: usize,
    pub seed: u64,
    pub credible_levels: Vec<f64>,
    pub shrinkage: Shrinkage,
    pub draw_inversion: DrawInversion,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        Self {
            analysis: WaveletFilter::haar(),
            smoothing: "la6".parse().expect("la6 is supported"),
            spins: DEFAULT_SPINS,
            samples: DEFAULT_SAMPLES,
            seed: 0,
            credible_levels: DEFAULT_CREDIBLE_LEVELS.to_vec(),
            shrinkage: Shrinkage::Bayes,
            draw_inversion: DrawInversion::Clamp,
        }
    }
}

impl EstimateConfig {
    /// Posterior realizations drawn per spin; the total is this times
    /// `spins`, which is at least `samples`.
    pub fn samples_per_spin(&self) -> usize {
        self.samples.div_ceil(self.spins.max(1))
    }

    fn validate(&self, len: usize, with_samples: bool) -> Result<()> {
        if self.spins == 0 || self.spins > len {
            return Err(Error::InvalidParameter(format!("spins must be in 1..={len}, got {}", self.spins)));
        }
        if with_samples && self.samples < MIN_SAMPLES {
            return Err(Error::InvalidParameter(format!(
                "at least {MIN_SAMPLES} posterior samples are required, got {}",
                self.samples
            )));
        }
        if let Some(c) = self.credible_levels.iter().find(|c| !(**c > 0.0 && **c < 1.0)) {
            return Err(Error::InvalidParameter(format!("credible level {c} outside (0, 1)")));
        }
        Ok(())
    }
}

/// Pointwise credible band at one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub level: f64,
    pub lower: Vec<Vec<f64>>,
    pub upper: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateMeta {
    pub analysis: String,
    pub smoothing: String,
    pub spins: usize,
    pub samples_requested: usize,
    pub samples_drawn: usize,
    pub seed: u64,
    pub shrinkage: Shrinkage,
    pub draw_inversion: DrawInversion,
    /// Posterior draws redrawn because the inverse Haar-Fisz transform
    /// rejected them (strict inversion).
    pub rejected_draws: usize,
    /// Posterior draws with at least one clipped ratio (clamped inversion).
    pub clamped_draws: usize,
    /// Ratios clipped over all draws (clamped inversion).
    pub clamped_draw_ratios: usize,
    /// Implied Fisz ratios clipped while inverting the point estimate.
    pub clipped_ratios: usize,
    /// Hyperparameter fits that ended on a box bound.
    pub boundary_fits: usize,
    /// Hyperparameter fits that stopped at the iteration cap.
    pub unconverged_fits: usize,
}

/// Spectrum estimate with credible bands; matrices are `J × T` with scale
/// `j` in row `j - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EwsEstimate {
    /// Bias-corrected posterior-mean spectrum clipped at zero.
    pub mean: Vec<Vec<f64>>,
    /// The same before clipping.
    pub mean_preclip: Vec<Vec<f64>>,
    /// Average of the corrected posterior realizations.
    pub sample_mean: Vec<Vec<f64>>,
    pub bands: Vec<Band>,
    pub meta: EstimateMeta,
}

impl EwsEstimate {
    pub fn levels(&self) -> usize {
        self.mean.len()
    }

    pub fn len(&self) -> usize {
        self.mean.first().map(Vec::len).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn band(&self, level: f64) -> Option<&Band> {
        self.bands.iter().find(|b| (b.level - level).abs() < 1e-12)
    }
}

/// Posterior-mean smoothing of the periodogram rows, before bias
/// correction, plus fit diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedPeriodogram {
    pub rows: Vec<Vec<f64>>,
    pub clipped_ratios: usize,
    pub boundary_fits: usize,
    pub unconverged_fits: usize,
}

struct UnitOutput {
    mean: Vec<f64>,
    draws: Vec<Vec<f64>>,
    rejected: usize,
    clamped_draws: usize,
    clamped_draw_ratios: usize,
    clipped: usize,
    boundary: usize,
    unconverged: usize,
}

fn spin_shift(spin: usize, spins: usize, len: usize) -> usize {
    spin * len / spins
}

fn rotate_left(v: &[f64], shift: usize) -> Vec<f64> {
    let n = v.len();
    (0..n).map(|k| v[(k + shift) % n]).collect()
}

fn rotate_right(v: &[f64], shift: usize) -> Vec<f64> {
    let n = v.len();
    let mut out = vec![0.0; n];
    for (k, &x) in v.iter().enumerate() {
        out[(k + shift) % n] = x;
    }
    out
}

/// RNG stream of one (spin, scale) unit.
fn unit_rng(seed: u64, unit: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(unit);
    rng
}

fn smooth_unit(
    row: &[f64],
    shift: usize,
    cfg: &EstimateConfig,
    draws: usize,
    rng: &mut ChaCha8Rng,
) -> Result<UnitOutput> {
    let h = haar_fisz_forward(&rotate_left(row, shift))?;
    let coeffs = dwt(&h, &cfg.smoothing)?;
    let (shrunk, params) = match cfg.shrinkage {
        Shrinkage::Bayes => {
            let params = fit_mmle(&coeffs)?;
            (params.posterior_mean(&coeffs), Some(params))
        }
        Shrinkage::Identity => (coeffs.clone(), None),
    };
    let (mean, clipped) = haar_fisz_inverse_clamped(&idwt(&shrunk, &cfg.smoothing)?)?;
    let mut out = UnitOutput {
        mean: rotate_right(&mean, shift),
        draws: Vec::with_capacity(draws),
        rejected: 0,
        clamped_draws: 0,
        clamped_draw_ratios: 0,
        clipped,
        boundary: 0,
        unconverged: 0,
    };
    if let Some(p) = &params {
        out.boundary = count_fits(p, |l| l.boundary);
        out.unconverged = count_fits(p, |l| !l.converged);
    }
    if draws == 0 {
        return Ok(out);
    }
    let samplers = params.as_ref().map(|p| p.samplers(&coeffs));
    // The scaling coefficient is not shrunk; under a flat prior its posterior
    // is Gaussian about the observed value with the coarsest level's noise scale.
    let scaling_sd = params.as_ref().map_or(0.0, |p| p.level(0).nu);
    while out.draws.len() < draws {
        let beta = match &samplers {
            Some(s) => DwtCoefficients {
                details: s.iter().map(|lvl| lvl.iter().map(|p| p.sample(rng)).collect()).collect(),
                scaling: coeffs.scaling + scaling_sd * Distribution::<f64>::sample(&StandardNormal, rng),
            },
            None => coeffs.clone(),
        };
        let h = idwt(&beta, &cfg.smoothing)?;
        match cfg.draw_inversion {
            DrawInversion::Clamp => {
                let (r, n) = haar_fisz_inverse_clamped(&h)?;
                out.clamped_draws += usize::from(n > 0);
                out.clamped_draw_ratios += n;
                out.draws.push(rotate_right(&r, shift));
            }
            DrawInversion::Strict => match haar_fisz_inverse(&h) {
                Ok(r) => out.draws.push(rotate_right(&r, shift)),
                Err(Error::InconsistentHaarFisz { .. }) => {
                    out.rejected += 1;
                    if out.rejected > draws {
                        return Err(Error::TooManyRejections {
                            rejected: out.rejected,
                            attempted: out.rejected + out.draws.len(),
                        });
                    }
                }
                Err(e) => return Err(e),
            },
        }
    }
    Ok(out)
}

// Coarse pooled levels share one fit; count it once.
fn count_fits(p: &HyperParams, pred: impl Fn(&crate::shrink::LevelParams) -> bool) -> usize {
    p.levels
        .iter()
        .enumerate()
        .filter(|(l, lp)| (*l + 1 >= POOLED_LEVELS) && pred(lp))
        .count()
}

fn run_units(rows: &[Vec<f64>], cfg: &EstimateConfig, draws: usize) -> Result<Vec<UnitOutput>> {
    let levels = rows.len();
    let len = rows[0].len();
    (0..cfg.spins * levels)
        .into_par_iter()
        .map(|unit| {
            let (spin, j) = (unit / levels, unit % levels);
            let mut rng = unit_rng(cfg.seed, unit as u64);
            smooth_unit(&rows[j], spin_shift(spin, cfg.spins, len), cfg, draws, &mut rng)
        })
        .collect()
}

fn check_rows(rows: &[Vec<f64>]) -> Result<usize> {
    let levels = rows.len();
    let len = rows.first().map(Vec::len).ok_or_else(|| Error::Empty("periodogram".into()))?;
    let expected = crate::dyadic_levels(len)?;
    if levels != expected || rows.iter().any(|r| r.len() != len) {
        return Err(Error::DimensionMismatch {
            expected: format!("{expected}x{len} periodogram"),
            found: format!("{levels} rows"),
        });
    }
    if expected < POOLED_LEVELS + 1 {
        return Err(Error::InvalidParameter(format!(
            "series of length {len} is too short; at least {} points are needed",
            1 << (POOLED_LEVELS + 1)
        )));
    }
    Ok(len)
}

/// Cycle-spun posterior-mean smoothing of each periodogram row (no bias
/// correction, no sampling).
pub fn smooth_periodogram(rows: &[Vec<f64>], cfg: &EstimateConfig) -> Result<SmoothedPeriodogram> {
    let len = check_rows(rows)?;
    cfg.validate(len, false)?;
    let units = run_units(rows, cfg, 0)?;
    let levels = rows.len();
    let mut out = vec![vec![0.0; len]; levels];
    for (unit, u) in units.iter().enumerate() {
        let row = &mut out[unit % levels];
        for (o, m) in row.iter_mut().zip(&u.mean) {
            *o += m;
        }
    }
    let scale = 1.0 / cfg.spins as f64;
    out.iter_mut().flatten().for_each(|v| *v *= scale);
    Ok(SmoothedPeriodogram {
        rows: out,
        clipped_ratios: units.iter().map(|u| u.clipped).sum(),
        boundary_fits: units.iter().map(|u| u.boundary).sum(),
        unconverged_fits: units.iter().map(|u| u.unconverged).sum(),
    })
}

/// Bias-corrected posterior-mean spectrum, before clipping.
pub fn point_estimate(periodogram: &RawWaveletPeriodogram, a: &InnerProductMatrix, cfg: &EstimateConfig) -> Result<Vec<Vec<f64>>> {
    let smoothed = smooth_periodogram(&periodogram.values, cfg)?;
    crate::lsw::correct_spectrum(&smoothed.rows, a)
}

/// Type-7 (linear interpolation) quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Estimates the EWS of `x` with credible bands.
pub fn estimate_ews(x: &[f64], cfg: &EstimateConfig) -> Result<EwsEstimate> {
    let periodogram = raw_wavelet_periodogram(x, &cfg.analysis)?;
    let a = InnerProductMatrix::new(&cfg.analysis, periodogram.levels())?;
    estimate_from_periodogram(&periodogram, &a, cfg)
}

/// As [`estimate_ews`], for a precomputed periodogram and matrix.
pub fn estimate_from_periodogram(
    periodogram: &RawWaveletPeriodogram,
    a: &InnerProductMatrix,
    cfg: &EstimateConfig,
) -> Result<EwsEstimate> {
    let rows = &periodogram.values;
    let len = check_rows(rows)?;
    cfg.validate(len, true)?;
    let levels = rows.len();
    let per_spin = cfg.samples_per_spin();
    let units = run_units(rows, cfg, per_spin)?;

    let mut smoothed = vec![vec![0.0; len]; levels];
    for (unit, u) in units.iter().enumerate() {
        for (o, m) in smoothed[unit % levels].iter_mut().zip(&u.mean) {
            *o += m;
        }
    }
    let scale = 1.0 / cfg.spins as f64;
    smoothed.iter_mut().flatten().for_each(|v| *v *= scale);
    let mean_preclip = crate::lsw::correct_spectrum(&smoothed, a)?;
    let mean = mean_preclip.iter().map(|r| r.iter().map(|v| v.max(0.0)).collect()).collect();

    // Per location: correct every realization, then summarize per scale.
    let total = per_spin * cfg.spins;
    // per location: sample means by scale, and (lower, upper) by level and scale
    type Column = (Vec<f64>, Vec<Vec<(f64, f64)>>);
    let columns: Vec<Column> = (0..len)
        .into_par_iter()
        .map(|k| {
            let mut values = vec![Vec::with_capacity(total); levels];
            let mut col = vec![0.0; levels];
            for spin in 0..cfg.spins {
                for r in 0..per_spin {
                    for (j, c) in col.iter_mut().enumerate() {
                        *c = units[spin * levels + j].draws[r][k];
                    }
                    for (j, s) in a.apply_inverse(&col).into_iter().enumerate() {
                        values[j].push(s);
                    }
                }
            }
            let mut means = Vec::with_capacity(levels);
            let mut bands = Vec::with_capacity(levels);
            for v in values.iter_mut() {
                means.push(v.iter().sum::<f64>() / total as f64);
                v.sort_by(f64::total_cmp);
                bands.push(
                    cfg.credible_levels
                        .iter()
                        .map(|c| (quantile_sorted(v, 0.5 * (1.0 - c)), quantile_sorted(v, 0.5 * (1.0 + c))))
                        .collect(),
                );
            }
            (means, bands)
        })
        .collect();

    let mut sample_mean = vec![vec![0.0; len]; levels];
    let mut bands: Vec<Band> = cfg
        .credible_levels
        .iter()
        .map(|&level| Band {
            level,
            lower: vec![vec![0.0; len]; levels],
            upper: vec![vec![0.0; len]; levels],
        })
        .collect();
    for (k, (means, col_bands)) in columns.into_iter().enumerate() {
        for j in 0..levels {
            sample_mean[j][k] = means[j];
            for (b, &(lo, hi)) in bands.iter_mut().zip(&col_bands[j]) {
                b.lower[j][k] = lo;
                b.upper[j][k] = hi;
            }
        }
    }

    Ok(EwsEstimate {
        mean,
        mean_preclip,
        sample_mean,
        bands,
        meta: EstimateMeta {
            analysis: cfg.analysis.name(),
            smoothing: cfg.smoothing.name(),
            spins: cfg.spins,
            samples_requested: cfg.samples,
            samples_drawn: total,
            seed: cfg.seed,
            shrinkage: cfg.shrinkage,
            draw_inversion: cfg.draw_inversion,
            rejected_draws: units.iter().map(|u| u.rejected).sum(),
            clamped_draws: units.iter().map(|u| u.clamped_draws).sum(),
            clamped_draw_ratios: units.iter().map(|u| u.clamped_draw_ratios).sum(),
            clipped_ratios: units.iter().map(|u| u.clipped).sum(),
            boundary_fits: units.iter().map(|u| u.boundary).sum(),
            unconverged_fits: units.iter().map(|u| u.unconverged).sum(),
        },
    })
}

/// Runs `f` on a dedicated pool of `threads` workers (all cores when
/// `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifts_round_trip() {
        let v: Vec<f64> = (0..8).map(f64::from).collect();
        assert_eq!(rotate_right(&rotate_left(&v, 3), 3), v);
        assert_eq!(rotate_left(&v, 3)[0], 3.0);
        assert_eq!(spin_shift(3, 4, 64), 48);
    }

    #[test]
    fn type7_quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&v, 0.0), 1.0);
        assert_eq!(quantile_sorted(&v, 1.0), 4.0);
        assert_eq!(quantile_sorted(&v, 0.5), 2.5);
        assert!((quantile_sorted(&v, 0.25) - 1.75).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        let cfg = EstimateConfig {
            samples: 10,
            ..Default::default()
        };
        assert!(cfg.validate(64, true).is_err());
        assert!(cfg.validate(64, false).is_ok());
        let cfg = EstimateConfig {
            spins: 0,
            ..Default::default()
        };
        assert!(cfg.validate(64, false).is_err());
        assert_eq!(EstimateConfig::default().samples_per_spin(), 50);
    }
}
