//! Estimation of the evolutionary wavelet spectrum (EWS) of locally
//! stationary wavelet (LSW) processes by Bayesian wavelet shrinkage of the
//! Haar-Fisz transformed raw wavelet periodogram.
//!
//! The pipeline, per periodogram scale:
//!
//! ```text
//! I_j ──Haar-Fisz──▶ H_j ──DWT──▶ h_{l,m} ──posterior──▶ β̂_{l,m} ──IDWT──▶ ──inverse H-F──▶ R̂_j
//! ```
//!
//! followed by bias correction with the inverse of the autocorrelation
//! wavelet inner-product matrix. Credible bands come from propagating
//! posterior draws of the wavelet coefficients through the same inverse
//! chain.
//!
//! # Scale indexing
//!
//! Two conventions coexist and are never mixed implicitly:
//!
//! * periodogram / spectrum scales `j = 1..=J`, with `j = 1` the finest.
//!   Matrices indexed by these scales store scale `j` in row `j - 1`.
//! * smoothing-DWT levels `l = 0..J`, with `l = 0` the coarsest (one
//!   coefficient) and `l = J - 1` the finest (`T / 2` coefficients).

pub mod cli;
pub mod error;
pub mod estimator;
pub mod haar_fisz;
pub mod io;
pub mod lsw;
pub mod shrink;
pub mod special;
pub mod wavelet;

pub use error::{Error, Result};
pub use estimator::{estimate_ews, DrawInversion, EstimateConfig, EwsEstimate};
pub use lsw::{Ews, RawWaveletPeriodogram};
pub use shrink::HyperParams;
pub use wavelet::{Family, InnerProductMatrix, WaveletFilter};

/// Returns `log2(n)` when `n` is a power of two (and at least 2).
pub fn dyadic_levels(n: usize) -> Result<usize> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NonDyadicLength(n));
    }
    Ok(n.trailing_zeros() as usize)
}
