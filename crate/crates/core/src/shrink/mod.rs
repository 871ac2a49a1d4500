//! Empirical-Bayes shrinkage of DWT coefficients under a Laplace
//! spike-and-slab prior.

mod kernel;
mod mmle;
mod optimize;
mod sampler;

pub use kernel::{log_marginal, marginal_loglik, posterior_moments, q_integrals, PosteriorMoments, QIntegrals, SlabPieces};
pub use mmle::{fit_level, fit_mmle, initial_nu, mad_sigma, ALPHA_START, BOX_FACTOR, NU_FLOOR, POOLED_LEVELS};
pub use optimize::{minimize_box, Minimum, Options};
pub use sampler::{sample_posterior, PosteriorSampler};

use serde::{Deserialize, Serialize};

use crate::wavelet::DwtCoefficients;

pub const ALPHA_MIN: f64 = 0.01;
pub const ALPHA_MAX: f64 = 0.999;

/// Hyperparameters of one DWT level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelParams {
    /// Prior probability of a zero coefficient.
    pub alpha: f64,
    /// Laplace rate; prior slab variance is `2 / τ²`.
    pub tau: f64,
    /// Noise standard deviation.
    pub nu: f64,
    /// Some coordinate of the fit sits on its box bound.
    pub boundary: bool,
    /// The optimizer met its tolerance before the iteration cap.
    pub converged: bool,
    /// Marginal log-likelihood at the fit (of the pooled sample for the
    /// coarse levels).
    pub loglik: f64,
}

impl LevelParams {
    pub fn new(alpha: f64, tau: f64, nu: f64) -> Self {
        Self {
            alpha,
            tau,
            nu,
            boundary: false,
            converged: true,
            loglik: f64::NAN,
        }
    }

    /// Prior odds `θ = α / (1 − α)`.
    pub fn theta(&self) -> f64 {
        self.alpha / (1.0 - self.alpha)
    }

    /// Parameters with the given odds instead of `α`.
    pub fn with_theta(mut self, theta: f64) -> Self {
        self.alpha = theta / (1.0 + theta);
        self
    }
}

/// Fitted hyperparameters for every detail level `l = 0..J` (coarsest
/// first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    pub levels: Vec<LevelParams>,
}

impl HyperParams {
    pub fn level(&self, l: usize) -> &LevelParams {
        &self.levels[l]
    }

    /// Posterior-mean coefficients; the scaling coefficient passes through.
    pub fn posterior_mean(&self, dwt: &DwtCoefficients) -> DwtCoefficients {
        DwtCoefficients {
            details: dwt
                .details
                .iter()
                .zip(&self.levels)
                .map(|(d, p)| d.iter().map(|&h| posterior_moments(h, p).mean).collect())
                .collect(),
            scaling: dwt.scaling,
        }
    }

    /// Per-coefficient samplers, laid out like `dwt.details`.
    pub fn samplers(&self, dwt: &DwtCoefficients) -> Vec<Vec<PosteriorSampler>> {
        dwt.details
            .iter()
            .zip(&self.levels)
            .map(|(d, p)| d.iter().map(|&h| PosteriorSampler::new(h, p)).collect())
            .collect()
    }
}
