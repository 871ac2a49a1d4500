//! Translation-invariant denoising baseline: soft thresholding of the
//! non-decimated wavelet transform of each raw periodogram row at the
//! universal threshold, followed by bias correction.
//!
//! This approximates the method-of-moments estimator it stands in for. The
//! noise scale is estimated separately on every NDWT level (MAD of that
//! level's coefficients): periodogram noise is strongly correlated at
//! coarse scales, so a single scale taken from the finest level leaves
//! coarse rows essentially unsmoothed.

use crate::error::Result;
use crate::lsw::{correct_spectrum, raw_wavelet_periodogram, RawWaveletPeriodogram};
use crate::shrink::mad_sigma;
use crate::wavelet::{ndwt_full, InnerProductMatrix, WaveletFilter};

fn soft(x: f64, t: f64) -> f64 {
    x.signum() * (x.abs() - t).max(0.0)
}

/// TI-denoised version of one row.
pub fn ti_denoise_row(row: &[f64], smoothing: &WaveletFilter) -> Result<Vec<f64>> {
    let levels = crate::dyadic_levels(row.len())?;
    let mut nd = ndwt_full(row, smoothing, levels)?;
    let universal = (2.0 * (row.len() as f64).ln()).sqrt();
    for d in nd.details.iter_mut() {
        let threshold = mad_sigma(d) * universal;
        d.iter_mut().for_each(|v| *v = soft(*v, threshold));
    }
    Ok(nd.reconstruct(smoothing))
}

/// Denoises every periodogram row and applies `A⁻¹`. Not clipped.
pub fn ti_denoise(periodogram: &RawWaveletPeriodogram, smoothing: &WaveletFilter, a: &InnerProductMatrix) -> Result<Vec<Vec<f64>>> {
    let rows = periodogram
        .values
        .iter()
        .map(|r| ti_denoise_row(r, smoothing))
        .collect::<Result<Vec<_>>>()?;
    correct_spectrum(&rows, a)
}

pub fn ti_denoise_baseline(x: &[f64], analysis: &WaveletFilter, smoothing: &WaveletFilter) -> Result<Vec<Vec<f64>>> {
    let p = raw_wavelet_periodogram(x, analysis)?;
    let a = InnerProductMatrix::new(analysis, p.levels())?;
    ti_denoise(&p, smoothing, &a)
}
