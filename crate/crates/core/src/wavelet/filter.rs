use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Daubechies compactly supported orthonormal wavelet families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Family {
    /// Minimum-phase ("extremal phase") filters, vanishing moments 1..=10.
    ExtremalPhase,
    /// Least-asymmetric ("symmlet") filters, vanishing moments 4..=10.
    LeastAsymmetric,
}

impl Family {
    pub fn supported_moments(self) -> std::ops::RangeInclusive<usize> {
        match self {
            Family::ExtremalPhase => 1..=10,
            Family::LeastAsymmetric => 4..=10,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Family::ExtremalPhase => "EP",
            Family::LeastAsymmetric => "LA",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::ExtremalPhase => f.write_str("extremal-phase"),
            Family::LeastAsymmetric => f.write_str("least-asymmetric"),
        }
    }
}

/// An orthonormal Daubechies low-pass filter.
///
/// The matching high-pass (wavelet) filter is `g_n = (-1)^n h_{L-1-n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletFilter {
    family: Family,
    vanishing_moments: usize,
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
}

const ORTHONORMALITY_TOL: f64 = 1e-12;

impl WaveletFilter {
    pub fn new(family: Family, vanishing_moments: usize) -> Result<Self> {
        if !family.supported_moments().contains(&vanishing_moments) {
            return Err(Error::UnsupportedFilter {
                family: family.to_string(),
                vanishing_moments,
                supported: supported_specs(),
            });
        }
        let lowpass = cached_lowpass(family, vanishing_moments)?.clone();
        Ok(Self::from_lowpass(family, vanishing_moments, lowpass))
    }

    pub fn haar() -> Self {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_lowpass(Family::ExtremalPhase, 1, vec![c, c])
    }

    fn from_lowpass(family: Family, vanishing_moments: usize, lowpass: Vec<f64>) -> Self {
        let n = lowpass.len();
        let highpass = (0..n)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                s * lowpass[n - 1 - i]
            })
            .collect();
        Self {
            family,
            vanishing_moments,
            lowpass,
            highpass,
        }
    }

    /// Every supported filter, EP 1..=10 then LA 4..=10.
    pub fn all() -> Vec<Self> {
        let mut out = Vec::new();
        for family in [Family::ExtremalPhase, Family::LeastAsymmetric] {
            for vm in family.supported_moments() {
                out.push(Self::new(family, vm).expect("supported grid"));
            }
        }
        out
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn vanishing_moments(&self) -> usize {
        self.vanishing_moments
    }

    pub fn lowpass(&self) -> &[f64] {
        &self.lowpass
    }

    pub fn highpass(&self) -> &[f64] {
        &self.highpass
    }

    /// Number of filter taps, the support length at the finest scale.
    pub fn len(&self) -> usize {
        self.lowpass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lowpass.is_empty()
    }

    /// Support length of the discrete wavelet at scale `j ≥ 1`:
    /// `(2^j - 1)(L₁ - 1) + 1`.
    pub fn support_length(&self, j: usize) -> usize {
        ((1usize << j) - 1) * (self.len() - 1) + 1
    }

    /// Short name such as `EP1` or `LA8`.
    pub fn name(&self) -> String {
        format!("{}{}", self.family.tag(), self.vanishing_moments)
    }

    /// Checks `Σh = √2` and `Σ h_n h_{n+2m} = δ_{0,m}`.
    pub fn validate(&self) -> Result<()> {
        validate_lowpass(&self.name(), &self.lowpass)
    }
}

impl fmt::Display for WaveletFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for WaveletFilter {
    type Err = Error;

    /// Accepts `haar`, `epN`/`dN` (extremal phase) and `laN`/`symN`
    /// (least asymmetric), case-insensitive.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let unknown = || Error::UnknownFilterSpec {
            spec: s.to_string(),
            supported: supported_specs(),
        };
        if lower == "haar" {
            return Ok(Self::haar());
        }
        let (family, digits) = if let Some(rest) = lower.strip_prefix("ep") {
            (Family::ExtremalPhase, rest)
        } else if let Some(rest) = lower.strip_prefix("la") {
            (Family::LeastAsymmetric, rest)
        } else if let Some(rest) = lower.strip_prefix("sym") {
            (Family::LeastAsymmetric, rest)
        } else if let Some(rest) = lower.strip_prefix('d') {
            (Family::ExtremalPhase, rest)
        } else {
            return Err(unknown());
        };
        let vm: usize = digits.parse().map_err(|_| unknown())?;
        if !family.supported_moments().contains(&vm) {
            return Err(unknown());
        }
        Self::new(family, vm)
    }
}

pub fn supported_specs() -> String {
    "haar, ep1..ep10, la4..la10".to_string()
}

fn validate_lowpass(name: &str, h: &[f64]) -> Result<()> {
    let fail = |reason: String| Error::InvalidFilter {
        name: name.to_string(),
        reason,
    };
    let sum: f64 = h.iter().sum();
    if (sum - std::f64::consts::SQRT_2).abs() > ORTHONORMALITY_TOL {
        return Err(fail(format!("sum of taps is {sum}, expected sqrt(2)")));
    }
    let n = h.len();
    for shift in (0..n).step_by(2) {
        let dot: f64 = (0..n - shift).map(|i| h[i] * h[i + shift]).sum();
        let target = if shift == 0 { 1.0 } else { 0.0 };
        if (dot - target).abs() > ORTHONORMALITY_TOL {
            return Err(fail(format!(
                "shift-{shift} autocorrelation is {dot}, expected {target}"
            )));
        }
    }
    Ok(())
}

type FilterCache = Vec<OnceLock<Result<Vec<f64>, String>>>;

fn cached_lowpass(family: Family, vm: usize) -> Result<&'static Vec<f64>> {
    static EP: OnceLock<FilterCache> = OnceLock::new();
    static LA: OnceLock<FilterCache> = OnceLock::new();
    let cache = match family {
        Family::ExtremalPhase => &EP,
        Family::LeastAsymmetric => &LA,
    };
    let slots = cache.get_or_init(|| (0..=10).map(|_| OnceLock::new()).collect());
    let name = format!("{}{}", family.tag(), vm);
    let entry = slots[vm].get_or_init(|| {
        let h = daubechies_lowpass(family, vm);
        validate_lowpass(&name, &h).map(|_| h).map_err(|e| e.to_string())
    });
    entry.as_ref().map_err(|reason| Error::InvalidFilter {
        name,
        reason: reason.clone(),
    })
}

/// Spectral factorization of the Daubechies product filter.
///
/// `|H(ω)|² = 2 cos^{2N}(ω/2) P(sin²(ω/2))` with
/// `P(y) = Σ_{k<N} C(N-1+k, k) y^k`. Each root `y` of `P` gives a
/// reciprocal pair of zeros of `H` in `z`; the family decides which member of
/// each pair is kept.
fn daubechies_lowpass(family: Family, n: usize) -> Vec<f64> {
    if n == 1 {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        return vec![c, c];
    }
    let p: Vec<f64> = (0..n).map(|k| binomial(n - 1 + k, k)).collect();
    let y_roots = polish_roots(&p, aberth_roots(&p));

    // Group roots so conjugate pairs are flipped together; keep one
    // representative with Im ≥ 0.
    let mut groups: Vec<Complex64> = Vec::new();
    for y in &y_roots {
        if y.im < -1e-10 {
            continue;
        }
        let y = if y.im.abs() <= 1e-10 {
            Complex64::new(y.re, 0.0)
        } else {
            *y
        };
        groups.push(y);
    }
    // Zero of H inside the unit circle for each group.
    let inside: Vec<Complex64> = groups
        .iter()
        .map(|&y| {
            let b = Complex64::new(2.0, 0.0) - 4.0 * y;
            let disc = (b * b - 4.0).sqrt();
            let z1 = (b + disc) / 2.0;
            let z2 = (b - disc) / 2.0;
            if z1.norm() < z2.norm() {
                z1
            } else {
                z2
            }
        })
        .collect();

    let build = |mask: u32| -> Vec<f64> {
        let mut zeros = Vec::new();
        for (i, z) in inside.iter().enumerate() {
            let z = if mask & (1 << i) != 0 { 1.0 / *z } else { *z };
            zeros.push(z);
            if z.im.abs() > 1e-12 {
                zeros.push(z.conj());
            }
        }
        for _ in 0..n {
            zeros.push(Complex64::new(-1.0, 0.0));
        }
        let coeffs = poly_from_roots(&zeros);
        let mut h: Vec<f64> = coeffs.iter().map(|c| c.re).collect();
        let s: f64 = h.iter().sum();
        let scale = std::f64::consts::SQRT_2 / s;
        h.iter_mut().for_each(|v| *v *= scale);
        h
    };

    match family {
        Family::ExtremalPhase => {
            let mut h = build(0);
            // Front-load the energy (the conventional orientation).
            let half = h.len() / 2;
            let head: f64 = h[..half].iter().map(|v| v * v).sum();
            if head < 0.5 {
                h.reverse();
            }
            h
        }
        Family::LeastAsymmetric => {
            let mut best: Option<(f64, Vec<f64>)> = None;
            for mask in 0..(1u32 << inside.len()) {
                let h = build(mask);
                let score = phase_nonlinearity(&h);
                if best.as_ref().is_none_or(|(s, _)| score < s - 1e-12) {
                    best = Some((score, h));
                }
            }
            best.expect("at least one root selection").1
        }
    }
}

/// Residual sum of squares of the unwrapped phase response about its
/// best-fitting line.
fn phase_nonlinearity(h: &[f64]) -> f64 {
    let m = 256;
    let mut phases = Vec::with_capacity(m);
    let mut omegas = Vec::with_capacity(m);
    let mut prev = 0.0;
    let mut offset = 0.0;
    for i in 0..m {
        // stay clear of ω = π where H vanishes
        let w = std::f64::consts::PI * (i as f64 + 0.5) / m as f64 * 0.95;
        let resp: Complex64 = h
            .iter()
            .enumerate()
            .map(|(n, &c)| c * Complex64::from_polar(1.0, -w * n as f64))
            .sum();
        let mut ph = resp.arg() + offset;
        if i > 0 {
            while ph - prev > std::f64::consts::PI {
                ph -= 2.0 * std::f64::consts::PI;
                offset -= 2.0 * std::f64::consts::PI;
            }
            while ph - prev < -std::f64::consts::PI {
                ph += 2.0 * std::f64::consts::PI;
                offset += 2.0 * std::f64::consts::PI;
            }
        }
        prev = ph;
        phases.push(ph);
        omegas.push(w);
    }
    let mw = omegas.iter().sum::<f64>() / m as f64;
    let mp = phases.iter().sum::<f64>() / m as f64;
    let sxy: f64 = omegas.iter().zip(&phases).map(|(w, p)| (w - mw) * (p - mp)).sum();
    let sxx: f64 = omegas.iter().map(|w| (w - mw) * (w - mw)).sum();
    let slope = sxy / sxx;
    omegas
        .iter()
        .zip(&phases)
        .map(|(w, p)| {
            let r = p - mp - slope * (w - mw);
            r * r
        })
        .sum()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficients (ascending powers) of `Π (x - r)`.
fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, &ci) in c.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= ci * r;
        }
        c = next;
    }
    c
}

fn eval_poly(p: &[f64], x: Complex64) -> (Complex64, Complex64) {
    let mut val = Complex64::new(0.0, 0.0);
    let mut der = Complex64::new(0.0, 0.0);
    for &c in p.iter().rev() {
        der = der * x + val;
        val = val * x + c;
    }
    (val, der)
}

/// Simultaneous Aberth–Ehrlich iteration for all roots of a real polynomial
/// given by ascending coefficients.
fn aberth_roots(p: &[f64]) -> Vec<Complex64> {
    let deg = p.len() - 1;
    let lead = p[deg];
    let radius = 1.0 + p[..deg].iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64 + 0.4;
            Complex64::from_polar(radius * 0.5, angle)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..deg {
            let (v, d) = eval_poly(p, z[i]);
            let ratio = v / d;
            let repulsion: Complex64 = (0..deg)
                .filter(|&k| k != i)
                .map(|k| 1.0 / (z[i] - z[k]))
                .sum();
            let step = ratio / (1.0 - ratio * repulsion);
            z[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
        }
        if max_step < 1e-16 {
            break;
        }
    }
    z
}

fn polish_roots(p: &[f64], roots: Vec<Complex64>) -> Vec<Complex64> {
    roots
        .into_iter()
        .map(|mut z| {
            for _ in 0..5 {
                let (v, d) = eval_poly(p, z);
                if d.norm() == 0.0 {
                    break;
                }
                z -= v / d;
            }
            z
        })
        .collect()
}
