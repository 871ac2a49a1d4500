//! Locally stationary wavelet processes: spectra, simulation, the raw
//! wavelet periodogram and its bias correction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::wavelet::{ndwt, ndwt_adjoint, InnerProductMatrix, WaveletFilter};

/// Evolutionary wavelet spectrum `S_j(k/T)` on `J` scales and `T = 2^J`
/// locations. Row `j - 1` is scale `j` (finest first).
#[derive(Debug, Clone, PartialEq)]
pub struct Ews {
    values: Vec<Vec<f64>>,
}

impl Ews {
    pub fn new(values: Vec<Vec<f64>>) -> Result<Self> {
        let levels = values.len();
        let len = values.first().map(Vec::len).unwrap_or(0);
        let expected = crate::dyadic_levels(len)?;
        if expected != levels {
            return Err(Error::DimensionMismatch {
                expected: format!("{expected} scales for {len} locations"),
                found: format!("{levels} scales"),
            });
        }
        for (j, row) in values.iter().enumerate() {
            if row.len() != len {
                return Err(Error::DimensionMismatch {
                    expected: format!("{len} locations"),
                    found: format!("{} at scale {}", row.len(), j + 1),
                });
            }
            for (k, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite(j * len + k));
                }
                if v < 0.0 {
                    return Err(Error::NegativeValue {
                        index: j * len + k,
                        value: v,
                    });
                }
            }
        }
        Ok(Self { values })
    }

    /// Spectrum from a function of `(scale j, rescaled time z = k/T)`.
    pub fn from_fn(len: usize, f: impl Fn(usize, f64) -> f64) -> Result<Self> {
        let levels = crate::dyadic_levels(len)?;
        let values = (1..=levels)
            .map(|j| (0..len).map(|k| f(j, k as f64 / len as f64)).collect())
            .collect();
        Self::new(values)
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::from_fn(len, |_, _| 0.0)
    }

    pub fn levels(&self) -> usize {
        self.values.len()
    }

    pub fn len(&self) -> usize {
        self.values[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `S_j(k/T)`, `j` 1-based.
    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.values[j - 1][k]
    }

    /// Row for scale `j` (1-based).
    pub fn scale(&self, j: usize) -> &[f64] {
        &self.values[j - 1]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Amplitudes `w_{j,k} = √S_j(k/T)`.
    pub fn amplitudes(&self) -> Vec<Vec<f64>> {
        self.values
            .iter()
            .map(|r| r.iter().map(|v| v.sqrt()).collect())
            .collect()
    }
}

/// Squared non-decimated wavelet coefficients `I_{j,k}`; row `j - 1` is
/// scale `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawWaveletPeriodogram {
    pub values: Vec<Vec<f64>>,
    pub filter: String,
}

impl RawWaveletPeriodogram {
    pub fn levels(&self) -> usize {
        self.values.len()
    }

    pub fn len(&self) -> usize {
        self.values.first().map(Vec::len).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn scale(&self, j: usize) -> &[f64] {
        &self.values[j - 1]
    }
}

/// Innovations `ξ_{j,k}` for every scale and location, drawn in scale-major
/// order.
pub fn draw_innovations<R: Rng + ?Sized>(levels: usize, len: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..levels)
        .map(|_| (0..len).map(|_| StandardNormal.sample(rng)).collect())
        .collect()
}

/// `X_t = Σ_j Σ_k w_{j,k} ψ_j[t - k] ξ_{j,k}` with periodic wrap, for
/// given innovations.
pub fn synthesize(ews: &Ews, filter: &WaveletFilter, innovations: &[Vec<f64>]) -> Result<Vec<f64>> {
    if innovations.len() != ews.levels() || innovations.iter().any(|r| r.len() != ews.len()) {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{} innovations", ews.levels(), ews.len()),
            found: format!("{} rows", innovations.len()),
        });
    }
    let coeffs: Vec<Vec<f64>> = ews
        .rows()
        .iter()
        .zip(innovations)
        .map(|(s, xi)| s.iter().zip(xi).map(|(v, e)| v.sqrt() * e).collect())
        .collect();
    ndwt_adjoint(&coeffs, filter)
}

/// One realization of the LSW process with spectrum `ews`, driven by a
/// ChaCha8 stream seeded with `seed`.
pub fn simulate_lsw(ews: &Ews, filter: &WaveletFilter, seed: u64) -> Result<Vec<f64>> {
    simulate_lsw_with(ews, filter, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn simulate_lsw_with<R: Rng + ?Sized>(ews: &Ews, filter: &WaveletFilter, rng: &mut R) -> Result<Vec<f64>> {
    let xi = draw_innovations(ews.levels(), ews.len(), rng);
    synthesize(ews, filter, &xi)
}

/// Raw wavelet periodogram on all `J = log₂ T` scales.
pub fn raw_wavelet_periodogram(x: &[f64], filter: &WaveletFilter) -> Result<RawWaveletPeriodogram> {
    let levels = crate::dyadic_levels(x.len())?;
    let details = ndwt(x, filter, levels)?;
    Ok(RawWaveletPeriodogram {
        values: details
            .into_iter()
            .map(|r| r.into_iter().map(|d| d * d).collect())
            .collect(),
        filter: filter.name(),
    })
}

fn check_dims(levels: usize, a: &InnerProductMatrix) -> Result<()> {
    if levels != a.levels() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} scales", a.levels()),
            found: format!("{levels} scales"),
        });
    }
    Ok(())
}

fn columnwise(rows: &[Vec<f64>], op: impl Fn(&[f64]) -> Vec<f64>) -> Vec<Vec<f64>> {
    let levels = rows.len();
    let len = rows.first().map(Vec::len).unwrap_or(0);
    let mut out = vec![vec![0.0; len]; levels];
    let mut col = vec![0.0; levels];
    for k in 0..len {
        for j in 0..levels {
            col[j] = rows[j][k];
        }
        for (j, v) in op(&col).into_iter().enumerate() {
            out[j][k] = v;
        }
    }
    out
}

/// `E[I_{j,k}] ≈ Σ_l A_{j,l} S_l(k/T)`.
pub fn expected_periodogram(ews: &Ews, a: &InnerProductMatrix) -> Result<Vec<Vec<f64>>> {
    check_dims(ews.levels(), a)?;
    Ok(columnwise(ews.rows(), |c| a.apply(c)))
}

/// `Var[I_{j,k}] ≈ 2 (Σ_l A_{j,l} S_l)²`.
pub fn periodogram_variance(ews: &Ews, a: &InnerProductMatrix) -> Result<Vec<Vec<f64>>> {
    Ok(expected_periodogram(ews, a)?
        .into_iter()
        .map(|r| r.into_iter().map(|m| 2.0 * m * m).collect())
        .collect())
}

/// Applies `A⁻¹` to the vector of scales at every location. The result is
/// not clipped and may be negative.
pub fn correct_spectrum(smoothed: &[Vec<f64>], a: &InnerProductMatrix) -> Result<Vec<Vec<f64>>> {
    check_dims(smoothed.len(), a)?;
    Ok(columnwise(smoothed, |c| a.apply_inverse(c)))
}

/// Scale carrying the slowly varying power in [`test_spectrum`].
pub const TEST_SPECTRUM_MID_SCALE: usize = 6;
/// Interval of rescaled time holding the finest-scale burst.
pub const TEST_SPECTRUM_BURST: (f64, f64) = (0.55, 0.65);
pub const TEST_SPECTRUM_BURST_POWER: f64 = 1.5;
pub const TEST_SPECTRUM_MID_POWER: f64 = 1.0;

/// Benchmark spectrum: a sinusoidal bump `sin²(πz)` of slowly varying power
/// at scale 6 and a box-shaped burst at the finest scale on
/// `z ∈ [0.55, 0.65)`. Every other scale is zero. Requires `T ≥ 64`.
pub fn test_spectrum(len: usize) -> Result<Ews> {
    let levels = crate::dyadic_levels(len)?;
    if levels < TEST_SPECTRUM_MID_SCALE {
        return Err(Error::InvalidParameter(format!(
            "test spectrum needs at least 64 locations, got {len}"
        )));
    }
    Ews::from_fn(len, |j, z| match j {
        1 if (TEST_SPECTRUM_BURST.0..TEST_SPECTRUM_BURST.1).contains(&z) => TEST_SPECTRUM_BURST_POWER,
        TEST_SPECTRUM_MID_SCALE => {
            let s = (std::f64::consts::PI * z).sin();
            TEST_SPECTRUM_MID_POWER * s * s
        }
        _ => 0.0,
    })
}

/// Single-scale smooth spectrum: `sin²(πz)` bump at `scale`, zero elsewhere.
pub fn single_scale_spectrum(len: usize, scale: usize, power: f64) -> Result<Ews> {
    let levels = crate::dyadic_levels(len)?;
    if scale == 0 || scale > levels {
        return Err(Error::InvalidScale(scale));
    }
    Ews::from_fn(len, |j, z| {
        if j == scale {
            let s = (std::f64::consts::PI * z).sin();
            power * s * s
        } else {
            0.0
        }
    })
}
