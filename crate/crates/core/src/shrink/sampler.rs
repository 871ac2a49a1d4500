//! Exact draws from the spike-and-slab posterior of one coefficient.

use rand::Rng;

use super::kernel::{posterior_weights, SlabPieces};
use super::LevelParams;
use crate::special::{log_norm_sf, norm_cdf, norm_isf_log, norm_ppf};

/// Precomputed posterior of one coefficient: spike weight, piece weight and
/// the two truncated Gaussians, each stored as `N(m, σ²)` restricted to
/// `[0, ∞)` (the negative piece is reflected).
#[derive(Debug, Clone, Copy)]
pub struct PosteriorSampler {
    spike: f64,
    neg: f64,
    neg_mu: f64,
    pos_mu: f64,
    sigma: f64,
}

impl PosteriorSampler {
    pub fn new(h: f64, params: &LevelParams) -> Self {
        let pieces = SlabPieces::new(h, params.tau, params.nu);
        let (spike, neg, _) = posterior_weights(h, params, &pieces);
        let s = params.nu * params.nu * params.tau;
        Self {
            spike,
            neg,
            neg_mu: -(h + s),
            pos_mu: h - s,
            sigma: params.nu,
        }
    }

    pub fn spike_weight(&self) -> f64 {
        self.spike
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        if u < self.spike {
            return 0.0;
        }
        if u < self.spike + self.neg {
            -positive_truncated_normal(self.neg_mu, self.sigma, rng)
        } else {
            positive_truncated_normal(self.pos_mu, self.sigma, rng)
        }
    }
}

/// Inverse-CDF draw of `N(μ, σ²)` conditioned on `X ≥ 0`.
fn positive_truncated_normal<R: Rng + ?Sized>(mu: f64, sigma: f64, rng: &mut R) -> f64 {
    let b = -mu / sigma;
    // u ∈ (0, 1]
    let u = 1.0 - rng.random::<f64>();
    let z = if b > 0.0 {
        // Upper tail: solve Q(z) = u Q(b) in logs so deep tails stay exact.
        norm_isf_log(u.ln() + log_norm_sf(b))
    } else {
        // Reflect: −Z is N(0,1) below −b, where Φ(−b) ≥ 1/2.
        -norm_ppf(u * norm_cdf(-b))
    };
    (mu + sigma * z).max(0.0)
}

/// One posterior draw of the coefficient.
pub fn sample_posterior<R: Rng + ?Sized>(h: f64, params: &LevelParams, rng: &mut R) -> f64 {
    PosteriorSampler::new(h, params).sample(rng)
}
