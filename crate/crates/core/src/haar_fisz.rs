//! Haar-Fisz variance stabilization of one periodogram scale.
//!
//! Forward: build the Haar pyramid of local means `c_{l,m}` and half
//! differences `d_{l,m}`, replace each difference by the Fisz ratio
//! `f = d / c` (zero where `c = 0`), then rebuild additively from the overall
//! mean: `c_{l+1,2m} = c_{l,m} + f_{l,m}`, `c_{l+1,2m+1} = c_{l,m} - f_{l,m}`.
//!
//! The pyramid uses means (division by 2), so a constant input maps to
//! itself and every ratio lies in `[-1, 1]` for nonnegative input.
//!
//! Inverse: split `H` back into means and half differences (these are the
//! ratios), then rebuild multiplicatively, `c·(1 ± f)`.

use crate::error::{Error, Result};

// Ratios recovered from a forward output can exceed 1 by rounding.
const RATIO_SLACK: f64 = 1e-9;

/// Fisz ratios `f_{l,m}` of a nonnegative vector, `ratios[l]` holding the
/// `2^l` ratios of level `l` (coarsest first), plus the overall mean.
pub fn fisz_ratios(v: &[f64]) -> Result<(Vec<Vec<f64>>, f64)> {
    let levels = crate::dyadic_levels(v.len())?;
    for (index, &value) in v.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite(index));
        }
        if value < 0.0 {
            return Err(Error::NegativeValue { index, value });
        }
    }
    let mut ratios = vec![Vec::new(); levels];
    let mut c = v.to_vec();
    for l in (0..levels).rev() {
        let half = c.len() / 2;
        let mut mean = vec![0.0; half];
        let mut f = vec![0.0; half];
        for m in 0..half {
            let (a, b) = (c[2 * m], c[2 * m + 1]);
            mean[m] = 0.5 * (a + b);
            f[m] = if mean[m] == 0.0 {
                0.0
            } else {
                (0.5 * (a - b) / mean[m]).clamp(-1.0, 1.0)
            };
        }
        ratios[l] = f;
        c = mean;
    }
    Ok((ratios, c[0]))
}

fn additive_rebuild(ratios: &[Vec<f64>], mean: f64) -> Vec<f64> {
    let mut c = vec![mean];
    for f in ratios {
        let mut next = Vec::with_capacity(2 * c.len());
        for (cm, fm) in c.iter().zip(f) {
            next.push(cm + fm);
            next.push(cm - fm);
        }
        c = next;
    }
    c
}

/// Additive decomposition of `H` into its overall mean and per-level half
/// differences; for a forward output these are exactly the Fisz ratios.
fn additive_split(h: &[f64]) -> Result<(Vec<Vec<f64>>, f64)> {
    let levels = crate::dyadic_levels(h.len())?;
    if let Some(index) = h.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(index));
    }
    let mut ratios = vec![Vec::new(); levels];
    let mut c = h.to_vec();
    for l in (0..levels).rev() {
        let half = c.len() / 2;
        let mut mean = vec![0.0; half];
        let mut f = vec![0.0; half];
        for m in 0..half {
            mean[m] = 0.5 * (c[2 * m] + c[2 * m + 1]);
            f[m] = 0.5 * (c[2 * m] - c[2 * m + 1]);
        }
        ratios[l] = f;
        c = mean;
    }
    Ok((ratios, c[0]))
}

/// Forward Haar-Fisz transform `H = F v` of a nonnegative dyadic vector.
pub fn haar_fisz_forward(v: &[f64]) -> Result<Vec<f64>> {
    let (ratios, mean) = fisz_ratios(v)?;
    Ok(additive_rebuild(&ratios, mean))
}

/// Exact inverse of [`haar_fisz_forward`].
///
/// Fails when an implied ratio has magnitude above one (or the overall
/// mean is negative), since no nonnegative vector maps to such an `H`.
pub fn haar_fisz_inverse(h: &[f64]) -> Result<Vec<f64>> {
    let (ratios, mean) = additive_split(h)?;
    if mean < 0.0 {
        return Err(Error::InconsistentHaarFisz {
            level: 0,
            position: 0,
            ratio: mean,
        });
    }
    for (level, f) in ratios.iter().enumerate() {
        if let Some(position) = f.iter().position(|r| r.abs() > 1.0 + RATIO_SLACK) {
            return Err(Error::InconsistentHaarFisz {
                level,
                position,
                ratio: f[position],
            });
        }
    }
    Ok(multiplicative_rebuild(&ratios, mean))
}

/// Inverse that clips implied ratios to `[-1, 1]` and a negative mean to
/// zero instead of failing. Returns the number of clipped ratios.
pub fn haar_fisz_inverse_clamped(h: &[f64]) -> Result<(Vec<f64>, usize)> {
    let (mut ratios, mean) = additive_split(h)?;
    let mut clipped = usize::from(mean < 0.0);
    for f in ratios.iter_mut() {
        for r in f.iter_mut() {
            if r.abs() > 1.0 + RATIO_SLACK {
                clipped += 1;
            }
        }
    }
    for f in ratios.iter_mut() {
        f.iter_mut().for_each(|r| *r = r.clamp(-1.0, 1.0));
    }
    Ok((multiplicative_rebuild(&ratios, mean.max(0.0)), clipped))
}

fn multiplicative_rebuild(ratios: &[Vec<f64>], mean: f64) -> Vec<f64> {
    let mut c = vec![mean];
    for f in ratios {
        let mut next = Vec::with_capacity(2 * c.len());
        for (&cm, &fm) in c.iter().zip(f) {
            let fm = fm.clamp(-1.0, 1.0);
            next.push(cm * (1.0 + fm));
            next.push(cm * (1.0 - fm));
        }
        c = next;
    }
    c
}
