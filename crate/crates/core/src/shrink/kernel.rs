//! Closed-form posterior quantities under the Laplace spike-and-slab prior
//!
//! ```text
//! β ~ α δ₀ + (1 − α) ξ_τ,   ξ_τ(x) = (τ/2) e^{−τ|x|},   h | β ~ N(β, ν²)
//! ```
//!
//! The slab part of the posterior splits at zero into two truncated
//! Gaussians, `N(μ₁, ν²)` on `(−∞, 0]` and `N(μ₂, ν²)` on `[0, ∞)` with
//! `μ₁ = h + ν²τ`, `μ₂ = h − ν²τ`. Their masses `W₋`, `W₊` (so that
//! `Q⁰ = W₋ + W₊`) are kept in log form: whenever the Gaussian tail is small
//! the factor `e^{±τh + ν²τ²/2}` cancels exactly against the tail's own
//! `e^{−μ²/2ν²}` and only a Mills ratio remains.

use crate::special::{log_add_exp, log_norm_pdf, mills_ratio, norm_pdf, norm_sf, tail_moments_given_mills, LN_SQRT_2PI};

use super::LevelParams;

/// The two halves of the slab posterior for one observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabPieces {
    /// `ln W₋`, mass of the slab integrand on `(−∞, 0]`.
    pub log_mass_neg: f64,
    /// `ln W₊`, mass on `[0, ∞)`.
    pub log_mass_pos: f64,
    /// Mean and variance of `N(μ₁, ν²)` restricted to `(−∞, 0]`.
    pub neg: (f64, f64),
    /// Mean and variance of `N(μ₂, ν²)` restricted to `[0, ∞)`.
    pub pos: (f64, f64),
}

impl SlabPieces {
    pub fn new(h: f64, tau: f64, nu: f64) -> Self {
        let log_half_tau = (0.5 * tau).ln();
        // The negative piece at h mirrors the positive piece at −h.
        let (neg_mass, neg_mean, neg_var) = positive_piece(-h, tau, nu);
        let (pos_mass, pos_mean, pos_var) = positive_piece(h, tau, nu);
        Self {
            log_mass_neg: log_half_tau + neg_mass,
            log_mass_pos: log_half_tau + pos_mass,
            neg: (-neg_mean, neg_var),
            pos: (pos_mean, pos_var),
        }
    }

    /// `ln Q⁰`.
    pub fn log_q0(&self) -> f64 {
        log_add_exp(self.log_mass_neg, self.log_mass_pos)
    }

    /// Probability of the negative piece within the slab.
    pub fn neg_share(&self) -> f64 {
        (self.log_mass_neg - self.log_q0()).exp()
    }

    /// `E_slab[|x|]` and `E_slab[(x − h)²]`.
    fn abs_and_sq_dev(&self, h: f64) -> (f64, f64) {
        let pn = self.neg_share();
        let pp = 1.0 - pn;
        let abs = -pn * self.neg.0 + pp * self.pos.0;
        let dn = self.neg.0 - h;
        let dp = self.pos.0 - h;
        let sq = pn * (self.neg.1 + dn * dn) + pp * (self.pos.1 + dp * dp);
        (abs, sq)
    }
}

/// For the positive piece, `ln[e^{−τh + ν²τ²/2} Q(b)]` with `b = −μ₂/ν`,
/// together with the mean and variance of `N(μ₂, ν²)` restricted to
/// `[0, ∞)`. Both share one Mills ratio.
fn positive_piece(h: f64, tau: f64, nu: f64) -> (f64, f64, f64) {
    let mu = h - nu * nu * tau;
    let b = -mu / nu;
    let (log_mass, (g, v)) = if b >= 0.0 {
        // Q(b) = φ(b) R(b) and the exponents collapse to −h²/2ν².
        let r = mills_ratio(b);
        (-0.5 * (h / nu) * (h / nu) - LN_SQRT_2PI + r.ln(), tail_moments_given_mills(b, r))
    } else {
        let q = norm_sf(b);
        let lambda = norm_pdf(b) / q;
        (
            -tau * h + 0.5 * (nu * tau) * (nu * tau) + q.ln(),
            (lambda - b, (1.0 + b * lambda - lambda * lambda).max(0.0)),
        )
    };
    (log_mass, nu * g, nu * nu * v)
}

/// `Qⁱ(h) = ∫ xⁱ ξ_τ(x) φ_ν(x − h) dx` for `i = 0, 1, 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QIntegrals {
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
}

pub fn q_integrals(h: f64, tau: f64, nu: f64) -> QIntegrals {
    let p = SlabPieces::new(h, tau, nu);
    let wn = p.log_mass_neg.exp();
    let wp = p.log_mass_pos.exp();
    let (en, vn) = p.neg;
    let (ep, vp) = p.pos;
    QIntegrals {
        q0: wn + wp,
        q1: wn * en + wp * ep,
        q2: wn * (vn + en * en) + wp * (vp + ep * ep),
    }
}

/// Posterior summary of one coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorMoments {
    pub mean: f64,
    pub variance: f64,
    /// Posterior probability that the coefficient is exactly zero.
    pub spike_weight: f64,
}

/// Posterior weights of (spike, negative slab piece, positive slab piece).
pub(crate) fn posterior_weights(h: f64, params: &LevelParams, pieces: &SlabPieces) -> (f64, f64, f64) {
    let log_spike = params.theta().ln() + log_norm_pdf(h, params.nu);
    let top = log_spike.max(pieces.log_mass_neg).max(pieces.log_mass_pos);
    let s = (log_spike - top).exp();
    let n = (pieces.log_mass_neg - top).exp();
    let p = (pieces.log_mass_pos - top).exp();
    let total = s + n + p;
    (s / total, n / total, p / total)
}

pub fn posterior_moments(h: f64, params: &LevelParams) -> PosteriorMoments {
    let pieces = SlabPieces::new(h, params.tau, params.nu);
    let (w0, wn, wp) = posterior_weights(h, params, &pieces);
    let (en, vn) = pieces.neg;
    let (ep, vp) = pieces.pos;
    let mean = wn * en + wp * ep;
    // Law of total variance over the three components; the spike sits at 0.
    let variance = wn * vn
        + wp * vp
        + w0 * mean * mean
        + wn * (en - mean) * (en - mean)
        + wp * (ep - mean) * (ep - mean);
    PosteriorMoments {
        mean,
        variance: variance.max(0.0),
        spike_weight: w0,
    }
}

/// Log marginal density `ln{α φ_ν(h) + (1 − α) Q⁰(h)}` of one coefficient.
pub fn log_marginal(h: f64, alpha: f64, tau: f64, nu: f64) -> f64 {
    let pieces = SlabPieces::new(h, tau, nu);
    log_add_exp(alpha.ln() + log_norm_pdf(h, nu), (-alpha).ln_1p() + pieces.log_q0())
}

/// Marginal log-likelihood of a level's coefficients.
pub fn marginal_loglik(coeffs: &[f64], alpha: f64, tau: f64, nu: f64) -> crate::Result<f64> {
    let mut total = 0.0;
    for (index, &h) in coeffs.iter().enumerate() {
        let term = log_marginal(h, alpha, tau, nu);
        if !term.is_finite() {
            return Err(crate::Error::NonFiniteLikelihood { index });
        }
        total += term;
    }
    Ok(total)
}

/// Log marginal of one coefficient and its gradient with respect to
/// `(logit α, ln τ, ln ν)`.
pub(crate) fn log_marginal_grad(h: f64, alpha: f64, tau: f64, nu: f64) -> (f64, [f64; 3]) {
    let pieces = SlabPieces::new(h, tau, nu);
    let log_spike = alpha.ln() + log_norm_pdf(h, nu);
    let log_slab = (-alpha).ln_1p() + pieces.log_q0();
    let value = log_add_exp(log_spike, log_slab);
    let r_spike = (log_spike - value).exp();
    let r_slab = (log_slab - value).exp();
    let (abs, sq) = pieces.abs_and_sq_dev(h);
    let z2 = (h / nu) * (h / nu);
    let grad = [
        r_spike * (1.0 - alpha) - r_slab * alpha,
        r_slab * (1.0 - tau * abs),
        r_spike * (z2 - 1.0) + r_slab * (sq / (nu * nu) - 1.0),
    ];
    (value, grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::norm_cdf;

    fn params(alpha: f64, tau: f64, nu: f64) -> LevelParams {
        LevelParams::new(alpha, tau, nu)
    }

    #[test]
    fn q0_at_origin_matches_closed_value() {
        let q = q_integrals(0.0, 1.0, 1.0);
        let expected = 0.5f64.exp() * norm_cdf(-1.0);
        assert!((q.q0 - expected).abs() < 1e-15 * expected);
        assert!((q.q0 - 0.26157).abs() < 1e-5);
        assert_eq!(q.q1, 0.0);
    }

    #[test]
    fn q_symmetry() {
        for &h in &[0.3, 2.0, 17.0, 40.0] {
            for &(tau, nu) in &[(0.01, 1.0), (1.0, 0.1), (10.0, 10.0)] {
                let a = q_integrals(h, tau, nu);
                let b = q_integrals(-h, tau, nu);
                assert!((a.q0 - b.q0).abs() <= 1e-14 * a.q0);
                assert!((a.q1 + b.q1).abs() <= 1e-14 * a.q1.abs().max(1e-300));
                assert!((a.q2 - b.q2).abs() <= 1e-14 * a.q2);
                assert!(a.q0 > 0.0 && a.q2 > 0.0);
            }
        }
    }

    #[test]
    fn moments_agree_with_q_ratios() {
        let p = params(0.6, 0.7, 1.3);
        for &h in &[-3.0, -0.4, 0.0, 1.1, 5.0] {
            let q = q_integrals(h, p.tau, p.nu);
            let spike = p.theta() * crate::special::norm_pdf(h / p.nu) / p.nu;
            let denom = spike + q.q0;
            let m = posterior_moments(h, &p);
            assert!((m.mean - q.q1 / denom).abs() < 1e-13);
            let var = q.q2 / denom - (q.q1 / denom).powi(2);
            assert!((m.variance - var).abs() < 1e-12);
            assert!((m.spike_weight - spike / denom).abs() < 1e-14);
        }
    }

    #[test]
    fn extreme_ratio_is_finite() {
        let p = params(0.9, 0.01, 0.1);
        let m = posterior_moments(4.0, &p);
        assert!(m.mean.is_finite() && m.variance.is_finite());
        assert!((m.mean - 4.0).abs() < 0.01);
        assert!(log_marginal(4.0, 0.9, 0.01, 0.1).is_finite());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let cases = [(0.3, 0.8, 0.5, 1.2), (-4.0, 0.2, 2.0, 0.7), (12.0, 0.95, 0.05, 3.0), (0.0, 0.5, 1.0, 1.0)];
        for &(h, a, t, n) in &cases {
            let (_, g) = log_marginal_grad(h, a, t, n);
            let logit = (a / (1.0 - a)).ln();
            let f = |z: [f64; 3]| {
                let a = 1.0 / (1.0 + (-z[0]).exp());
                log_marginal(h, a, z[1].exp(), z[2].exp())
            };
            let z = [logit, t.ln(), n.ln()];
            for i in 0..3 {
                let e = 1e-6;
                let mut zp = z;
                let mut zm = z;
                zp[i] += e;
                zm[i] -= e;
                let fd = (f(zp) - f(zm)) / (2.0 * e);
                assert!((fd - g[i]).abs() < 1e-6 * (1.0 + fd.abs()), "h={h} i={i} fd={fd} g={}", g[i]);
            }
        }
    }

    #[test]
    fn loglik_reports_offending_index() {
        let err = marginal_loglik(&[0.0, f64::NAN], 0.5, 1.0, 1.0).unwrap_err();
        assert!(matches!(err, crate::Error::NonFiniteLikelihood { index: 1 }));
    }
}
