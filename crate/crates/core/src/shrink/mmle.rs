//! Marginal maximum likelihood fitting of `(α, τ, ν)` per DWT level.

use super::kernel::log_marginal_grad;
use super::optimize::{minimize_box, Options};
use super::{HyperParams, LevelParams, ALPHA_MAX, ALPHA_MIN};
use crate::error::{Error, Result};
use crate::wavelet::DwtCoefficients;

/// Number of coarsest levels fitted jointly; they hold `2⁴ − 1 = 15`
/// coefficients between them.
pub const POOLED_LEVELS: usize = 4;
/// Multiplicative half-width of the `τ` and `ν` search boxes.
pub const BOX_FACTOR: f64 = 1e3;
pub const ALPHA_START: f64 = 0.9;
/// Smallest noise scale considered. Haar-Fisz output has unit-free noise of
/// order 0.1–1, so this only matters for (numerically) noise-free input,
/// which it turns into a spike-only fit.
pub const NU_FLOOR: f64 = 1e-8;
const MAD_TO_SD: f64 = 0.6745;

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// `median(|h|) / 0.6745`.
pub fn mad_sigma(coeffs: &[f64]) -> f64 {
    if coeffs.is_empty() {
        return 0.0;
    }
    let mut a: Vec<f64> = coeffs.iter().map(|v| v.abs()).collect();
    a.sort_by(f64::total_cmp);
    let n = a.len();
    let med = if n % 2 == 1 { a[n / 2] } else { 0.5 * (a[n / 2 - 1] + a[n / 2]) };
    med / MAD_TO_SD
}

/// Noise-scale start point from the finest coefficients, floored at
/// [`NU_FLOOR`].
pub fn initial_nu(finest: &[f64]) -> f64 {
    mad_sigma(finest).max(NU_FLOOR)
}

/// `τ₀ = 1 / sd`, with the root-mean-square as `sd` (coefficients are
/// centred at zero under the model).
fn start_tau(coeffs: &[f64], nu0: f64) -> f64 {
    let sd = (coeffs.iter().map(|v| v * v).sum::<f64>() / coeffs.len() as f64).sqrt();
    1.0 / if sd > 0.0 { sd } else { nu0 }
}

/// Maximizes the marginal likelihood of `coeffs` (treated as one i.i.d.
/// sample) from the documented start point `α₀ = 0.9`, `τ₀ = 1/sd`,
/// `ν₀ = nu0`, with `τ` and `ν` boxed to `[10⁻³, 10³]` times their start
/// (and `ν ≥ NU_FLOOR`).
pub fn fit_level(coeffs: &[f64], nu0: f64) -> Result<LevelParams> {
    if coeffs.is_empty() {
        return Err(Error::Empty("coefficients to fit".into()));
    }
    if let Some(i) = coeffs.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    if !(nu0 > 0.0 && nu0.is_finite()) {
        return Err(Error::InvalidParameter(format!("initial noise scale {nu0}")));
    }
    let tau0 = start_tau(coeffs, nu0);
    let spread = BOX_FACTOR.ln();
    let lo = [logit(ALPHA_MIN), tau0.ln() - spread, (nu0.ln() - spread).max(NU_FLOOR.ln())];
    let hi = [logit(ALPHA_MAX), tau0.ln() + spread, nu0.ln() + spread];
    let start = [logit(ALPHA_START), tau0.ln(), nu0.ln()];
    let n = coeffs.len() as f64;

    let objective = |z: &[f64]| {
        let (alpha, tau, nu) = (sigmoid(z[0]), z[1].exp(), z[2].exp());
        let mut value = 0.0;
        let mut grad = vec![0.0; 3];
        for &h in coeffs {
            let (v, g) = log_marginal_grad(h, alpha, tau, nu);
            value += v;
            for k in 0..3 {
                grad[k] += g[k];
            }
        }
        (-value / n, grad.into_iter().map(|g| -g / n).collect())
    };
    let m = minimize_box(objective, &start, &lo, &hi, Options::default());

    let mut x = m.x.clone();
    let mut value = m.value;
    // When slab and spike are nearly indistinguishable the likelihood is flat
    // in α; snap to an α bound that is at least as good.
    for bound in [hi[0], lo[0]] {
        let mut trial = x.clone();
        trial[0] = bound;
        let (v, _) = objective(&trial);
        if v <= value {
            x = trial;
            value = v;
        }
    }
    let near = |v: f64, b: f64| (v - b).abs() <= 1e-8 * (1.0 + b.abs());
    let boundary = (0..3).any(|i| near(x[i], lo[i]) || near(x[i], hi[i]));
    // Bounds are exact in the transformed coordinates; clamp away rounding
    // from the back-transform.
    let alpha = sigmoid(x[0]).clamp(ALPHA_MIN, ALPHA_MAX);
    Ok(LevelParams {
        alpha,
        tau: x[1].exp(),
        nu: x[2].exp(),
        boundary,
        converged: m.converged,
        loglik: -value * n,
    })
}

/// Fits every detail level of `dwt`: levels `l ≥ 4` independently, levels
/// `0..4` as one pooled sample whose fit is assigned to level 3 and carried
/// to coarser levels by halving `τ` and doubling the odds `θ` per level.
pub fn fit_mmle(dwt: &DwtCoefficients) -> Result<HyperParams> {
    let levels = dwt.levels();
    if levels < POOLED_LEVELS + 1 {
        return Err(Error::InvalidParameter(format!(
            "hyperparameter fitting needs at least {} DWT levels, got {levels}",
            POOLED_LEVELS + 1
        )));
    }
    let nu0 = initial_nu(&dwt.details[levels - 1]);
    let pooled: Vec<f64> = dwt.details[..POOLED_LEVELS].iter().flatten().copied().collect();
    let anchor = fit_level(&pooled, nu0)?;
    let tau_floor = start_tau(&pooled, nu0) / BOX_FACTOR;
    let mut out = Vec::with_capacity(levels);
    for l in 0..POOLED_LEVELS {
        let steps = (POOLED_LEVELS - 1 - l) as i32;
        out.push(anchor.rescaled(steps, tau_floor));
    }
    for l in POOLED_LEVELS..levels {
        out.push(fit_level(&dwt.details[l], nu0)?);
    }
    Ok(HyperParams { levels: out })
}

impl LevelParams {
    /// Moves `steps` levels coarser: `τ / 2^steps`, `θ · 2^steps`, clipped to
    /// the α box and to `tau_floor`.
    fn rescaled(&self, steps: i32, tau_floor: f64) -> LevelParams {
        if steps == 0 {
            return self.clone();
        }
        let factor = 2f64.powi(steps);
        let theta = self.theta() * factor;
        let alpha = (theta / (1.0 + theta)).clamp(ALPHA_MIN, ALPHA_MAX);
        LevelParams {
            alpha,
            tau: (self.tau / factor).max(tau_floor),
            ..self.clone()
        }
    }
}
