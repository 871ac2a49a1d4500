//! Gaussian tail functions evaluated without overflow.
//!
//! Everything the shrinkage kernels need reduces to the standard normal
//! tail `Q(b) = 1 - Φ(b)` and its Mills ratio `R(b) = Q(b) / φ(b)`. Both
//! are expressed through the scaled complementary error function
//! `erfcx(x) = exp(x²) erfc(x)`, which stays O(1/x) where `erfc` itself
//! underflows.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// `ln(2π) / 2`
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const SQRT_FRAC_PI_2: f64 = 1.253_314_137_315_500_3;

// Above this argument erfcx switches from exp(x²)·erfc(x) to the continued
// fraction; below it the product is accurate to a few ulps (erfc underflows
// just past 26.5).
const ERFCX_CF_THRESHOLD: f64 = 26.0;
// Below this truncation point the moments come straight from the Mills
// ratio (losing about `ε·b⁴` relative accuracy to cancellation); above it,
// from continued fractions.
const MOMENT_CF_THRESHOLD: f64 = 20.0;
// Continued fractions stop once a step changes the value by a few ulps.
const CF_TOL: f64 = 4.0 * f64::EPSILON;

#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Scaled complementary error function `exp(x²) erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        if x < -26.6 {
            return f64::INFINITY;
        }
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    if x < 4.0 {
        return (x * x).exp() * libm::erfc(x);
    }
    if x < ERFCX_CF_THRESHOLD {
        // x² = h² + (x - h)(x + h) with h holding 20 significant bits, so h²
        // is exact and exp() sees no rounding error amplified by x².
        let h = (x * 65536.0).trunc() / 65536.0;
        let r = (x - h) * (x + h);
        return (h * h).exp() * (r.exp() * libm::erfc(x));
    }
    if x > 1e8 {
        return FRAC_1_SQRT_PI / x;
    }
    // erfcx(x)·√π = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), modified Lentz.
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < CF_TOL {
            break;
        }
    }
    FRAC_1_SQRT_PI / f
}

/// Standard normal density.
#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

/// Log of the `N(0, sd²)` density at `x`.
#[inline]
pub fn log_norm_pdf(x: f64, sd: f64) -> f64 {
    let z = x / sd;
    -0.5 * z * z - sd.ln() - LN_SQRT_2PI
}

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `Q(b) = P(Z > b)`.
pub fn norm_sf(b: f64) -> f64 {
    0.5 * libm::erfc(b * FRAC_1_SQRT_2)
}

/// Mills ratio `R(b) = Q(b) / φ(b)`, finite for every finite `b`
/// (it overflows only for `b < -37`, where `Q(b) = 1`).
pub fn mills_ratio(b: f64) -> f64 {
    SQRT_FRAC_PI_2 * erfcx(b * FRAC_1_SQRT_2)
}

/// `ln Φ(z)`, accurate in both tails.
pub fn log_norm_cdf(z: f64) -> f64 {
    if z < -5.0 {
        // Φ(z) = Q(-z) = R(-z) φ(z)
        mills_ratio(-z).ln() - 0.5 * z * z - LN_SQRT_2PI
    } else if z > 5.0 {
        (-norm_sf(z)).ln_1p()
    } else {
        norm_cdf(z).ln()
    }
}

/// `ln Q(b) = ln P(Z > b)`.
#[inline]
pub fn log_norm_sf(b: f64) -> f64 {
    log_norm_cdf(-b)
}

/// Inverse hazard `λ(b) = φ(b) / Q(b)`.
pub fn inverse_mills(b: f64) -> f64 {
    if b < 0.0 {
        norm_pdf(b) / norm_sf(b)
    } else {
        1.0 / mills_ratio(b)
    }
}

/// Tail of the Mills-ratio continued fraction
/// `K_n(b) = n / (b + (n+1) / (b + (n+2) / ...))`, for `b` well above zero.
fn mills_cf_tail(n: usize, b: f64) -> f64 {
    // Modified Lentz on b + (n+1)/(b + (n+2)/(b + ...)), then K_n = n / that.
    let tiny = 1e-300;
    let mut f = b;
    let mut c = b;
    let mut d = 0.0;
    for k in (n + 1)..(n + 4000) {
        let a = k as f64;
        d = b + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < CF_TOL {
            break;
        }
    }
    n as f64 / f
}

/// Mean and variance of `N(μ, σ²)` conditioned on `X ≥ 0`.
pub fn positive_truncated_moments(mu: f64, sigma: f64) -> (f64, f64) {
    let b = -mu / sigma;
    let (g, v) = standard_tail_moments(b);
    (sigma * g, sigma * sigma * v)
}

/// For `Z ~ N(0,1)` restricted to `Z ≥ b`, returns `(E[Z] - b, Var[Z])`.
///
/// Returning the mean relative to the truncation point keeps it accurate in
/// the far tail where `E[Z] ≈ b + 1/b`.
pub fn standard_tail_moments(b: f64) -> (f64, f64) {
    if b >= 0.0 {
        tail_moments_given_mills(b, mills_ratio(b))
    } else {
        let lambda = inverse_mills(b);
        (lambda - b, (1.0 + b * lambda - lambda * lambda).max(0.0))
    }
}

/// [`standard_tail_moments`] for `b ≥ 0` when `r = R(b)` is already known.
pub fn tail_moments_given_mills(b: f64, r: f64) -> (f64, f64) {
    if b >= MOMENT_CF_THRESHOLD {
        let k1 = mills_cf_tail(1, b);
        let k2 = mills_cf_tail(2, b);
        (k1, (k1 * (k2 - k1)).max(0.0))
    } else {
        let g = (1.0 - b * r) / r;
        (g, (1.0 - g / r).max(0.0))
    }
}

/// Inverse standard normal CDF.
pub fn norm_ppf(p: f64) -> f64 {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let mut x = acklam(p);
    // One Halley step against the accurate CDF.
    let e = if x < 0.0 {
        norm_cdf(x) - p
    } else {
        (1.0 - p) - norm_sf(x)
    };
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    if u.is_finite() {
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

/// Returns `b` with `ln Q(b) = log_p`, i.e. the upper-tail quantile, for
/// probabilities far below the smallest normal double.
pub fn norm_isf_log(log_p: f64) -> f64 {
    if log_p >= 0.0 {
        return f64::NEG_INFINITY;
    }
    if log_p > -30.0 {
        return -norm_ppf(log_p.exp());
    }
    let t = -2.0 * log_p;
    let mut b = (t - t.ln() - (2.0 * PI).ln()).max(1.0).sqrt();
    for _ in 0..50 {
        // d/db ln Q(b) = -λ(b)
        let step = (log_norm_sf(b) - log_p) / inverse_mills(b);
        b += step;
        if step.abs() <= 1e-15 * b.abs() {
            break;
        }
    }
    b
}

fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// `ln(e^a + e^b)` with `-∞` handled.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Midpoint-free reference: Q(b) by Simpson integration of φ on [b, b+40].
    fn tail_by_quadrature(b: f64) -> f64 {
        let n = 200_000;
        let h = 40.0 / n as f64;
        let mut s = norm_pdf(b) + norm_pdf(b + 40.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * norm_pdf(b + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn erfcx_continued_fraction_agrees_with_product() {
        for &x in &[4.0f64, 5.5, 8.0, 12.0, 20.0] {
            let direct = (x * x).exp() * libm::erfc(x);
            assert!((erfcx(x) - direct).abs() / direct < 1e-12, "x={x}");
        }
        for t in [4.0, ERFCX_CF_THRESHOLD] {
            let (lo, hi) = (erfcx(t - 1e-14), erfcx(t + 1e-14));
            assert!((lo - hi).abs() / hi < 1e-13, "x={t}");
        }
    }

    #[test]
    fn erfcx_asymptote() {
        for &x in &[10.0, 50.0, 1e3, 1e6] {
            let leading = FRAC_1_SQRT_PI / x * (1.0 - 0.5 / (x * x));
            assert!((erfcx(x) - leading).abs() / leading < 1.0 / x.powi(4) + 1e-15);
        }
        assert!((erfcx(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn log_cdf_matches_quadrature_in_tail() {
        for &b in &[0.5, 3.0, 6.0, 12.0, 30.0] {
            let q = tail_by_quadrature(b);
            let got = log_norm_sf(b);
            assert!((got - q.ln()).abs() < 1e-9, "b={b}: {got} vs {}", q.ln());
        }
        // far beyond double range
        let b = 40.0;
        let expect = -0.5 * b * b - LN_SQRT_2PI - b.ln() + (1.0 - 1.0 / (b * b)).ln();
        assert!((log_norm_sf(b) - expect).abs() < 1e-5);
        assert!(log_norm_cdf(40.0).abs() < 1e-300);
    }

    #[test]
    fn tail_moments_agree_across_branch() {
        for t in [0.0, MOMENT_CF_THRESHOLD] {
            let below = standard_tail_moments(t - 1e-13);
            let above = standard_tail_moments(t + 1e-13);
            assert!((below.0 - above.0).abs() / above.0 < 1e-9, "b={t}");
            assert!((below.1 - above.1).abs() / above.1 < 1e-9, "b={t}");
        }
        // untruncated limit
        let (g, v) = standard_tail_moments(-40.0);
        assert!((g - 40.0).abs() < 1e-12 && (v - 1.0).abs() < 1e-12);
        // far tail: mean offset ≈ 1/b, variance ≈ 1/b²
        let (g, v) = standard_tail_moments(1e3);
        assert!((g * 1e3 - 1.0).abs() < 1e-5 && (v * 1e6 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn ppf_inverts_cdf() {
        for &p in &[1e-300, 1e-20, 1e-5, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-12] {
            let x = norm_ppf(p);
            let back = norm_cdf(x);
            assert!((back - p).abs() <= 1e-13 * p.max(1e-300) + 1e-16, "p={p} x={x} back={back}");
        }
    }

    #[test]
    fn isf_log_inverts_log_tail() {
        for &lp in &[-0.1, -5.0, -29.0, -31.0, -200.0, -800.0, -5000.0] {
            let b = norm_isf_log(lp);
            assert!((log_norm_sf(b) - lp).abs() < 1e-9 * lp.abs(), "lp={lp} b={b}");
        }
    }
}
