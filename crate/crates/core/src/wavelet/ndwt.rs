use crate::error::{Error, Result};
use crate::wavelet::WaveletFilter;

/// Non-decimated (à trous) periodic transform.
///
/// `details[j - 1]` is scale `j` (finest first); `smooth` is the low-pass
/// remainder after the last scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Ndwt {
    pub details: Vec<Vec<f64>>,
    pub smooth: Vec<f64>,
}

fn check_levels(len: usize, levels: usize) -> Result<()> {
    let max = crate::dyadic_levels(len)?;
    if levels == 0 || levels > max {
        return Err(Error::TooManyLevels { levels, len, max });
    }
    Ok(())
}

/// Non-decimated detail coefficients for scales `1..=levels`.
pub fn ndwt(signal: &[f64], filter: &WaveletFilter, levels: usize) -> Result<Vec<Vec<f64>>> {
    Ok(ndwt_full(signal, filter, levels)?.details)
}

pub fn ndwt_full(signal: &[f64], filter: &WaveletFilter, levels: usize) -> Result<Ndwt> {
    check_levels(signal.len(), levels)?;
    let n = signal.len();
    let mask = n - 1;
    let h = filter.lowpass();
    let g = filter.highpass();
    let mut approx = signal.to_vec();
    let mut details = Vec::with_capacity(levels);
    for j in 1..=levels {
        let step = 1usize << (j - 1);
        let mut next = vec![0.0; n];
        let mut det = vec![0.0; n];
        for k in 0..n {
            let (mut a, mut d) = (0.0, 0.0);
            for (i, (&hi, &gi)) in h.iter().zip(g).enumerate() {
                let v = approx[(k + step * i) & mask];
                a += hi * v;
                d += gi * v;
            }
            next[k] = a;
            det[k] = d;
        }
        details.push(det);
        approx = next;
    }
    Ok(Ndwt {
        details,
        smooth: approx,
    })
}

impl Ndwt {
    /// Averaging inverse: at every scale the two decimation phases are
    /// reconstructed and averaged. Equivalent to averaging the orthogonal
    /// inverse over all circular shifts.
    pub fn reconstruct(&self, filter: &WaveletFilter) -> Vec<f64> {
        let n = self.smooth.len();
        let mask = n - 1;
        let h = filter.lowpass();
        let g = filter.highpass();
        let mut approx = self.smooth.clone();
        for (idx, det) in self.details.iter().enumerate().rev() {
            let step = 1usize << idx;
            let mut prev = vec![0.0; n];
            for k in 0..n {
                let (a, d) = (approx[k], det[k]);
                for (i, (&hi, &gi)) in h.iter().zip(g).enumerate() {
                    prev[(k + step * i) & mask] += 0.5 * (hi * a + gi * d);
                }
            }
            approx = prev;
        }
        approx
    }
}

/// Adjoint of [`ndwt`]: `Σ_j W_jᵀ c_j`, i.e. the series
/// `x[t] = Σ_j Σ_k c_j[k] ψ_j[t - k]` with periodic wrap.
///
/// `coeffs[j - 1]` are the coefficients for scale `j`.
pub fn ndwt_adjoint(coeffs: &[Vec<f64>], filter: &WaveletFilter) -> Result<Vec<f64>> {
    let levels = coeffs.len();
    let n = coeffs.first().map(Vec::len).ok_or_else(|| Error::Empty("no scales".into()))?;
    check_levels(n, levels)?;
    if let Some(bad) = coeffs.iter().find(|c| c.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n.to_string(),
            found: bad.len().to_string(),
        });
    }
    let mask = n - 1;
    let h = filter.lowpass();
    let g = filter.highpass();
    let mut acc = vec![0.0; n];
    for j in (1..=levels).rev() {
        let step = 1usize << (j - 1);
        let c = &coeffs[j - 1];
        let mut next = vec![0.0; n];
        for k in 0..n {
            let (a, d) = (acc[k], c[k]);
            if a == 0.0 && d == 0.0 {
                continue;
            }
            for (i, (&hi, &gi)) in h.iter().zip(g).enumerate() {
                next[(k + step * i) & mask] += hi * a + gi * d;
            }
        }
        acc = next;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::dwt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn haar_impulse_response() {
        let mut x = vec![0.0; 16];
        x[0] = 1.0;
        let d = ndwt(&x, &WaveletFilter::haar(), 1).unwrap();
        let nz: Vec<f64> = d[0].iter().copied().filter(|v| *v != 0.0).collect();
        assert_eq!(nz.len(), 2);
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let mut sorted = nz.clone();
        sorted.sort_by(f64::total_cmp);
        assert!((sorted[0] + c).abs() < 1e-15 && (sorted[1] - c).abs() < 1e-15);
    }

    #[test]
    fn translation_equivariant() {
        let x = gaussian(128, 3);
        let s = 7;
        let shifted: Vec<f64> = (0..128).map(|t| x[(t + 128 - s) % 128]).collect();
        for f in WaveletFilter::all() {
            let a = ndwt(&x, &f, 7).unwrap();
            let b = ndwt(&shifted, &f, 7).unwrap();
            for (ra, rb) in a.iter().zip(&b) {
                for k in 0..128 {
                    assert!((rb[(k + s) % 128] - ra[k]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn decimation_reproduces_dwt() {
        let x = gaussian(256, 4);
        for f in WaveletFilter::all() {
            let nd = ndwt(&x, &f, 8).unwrap();
            let d = dwt(&x, &f).unwrap();
            for j in 1..=8usize {
                let level = 8 - j;
                for (m, v) in d.details[level].iter().enumerate() {
                    assert!((nd[j - 1][m << j] - v).abs() < 1e-11, "{} j={j}", f.name());
                }
            }
        }
    }

    #[test]
    fn averaging_inverse_reconstructs() {
        let x = gaussian(64, 5);
        for f in WaveletFilter::all() {
            let back = ndwt_full(&x, &f, 6).unwrap().reconstruct(&f);
            let err = x.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-10, "{}: {err}", f.name());
        }
    }

    #[test]
    fn adjoint_identity() {
        // <W x, c> = <x, Wᵀ c>
        let x = gaussian(64, 6);
        let c: Vec<Vec<f64>> = (0..6).map(|j| gaussian(64, 10 + j)).collect();
        for f in [WaveletFilter::haar(), "la8".parse().unwrap()] {
            let wx = ndwt(&x, &f, 6).unwrap();
            let lhs: f64 = wx.iter().zip(&c).map(|(a, b)| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>()).sum();
            let wtc = ndwt_adjoint(&c, &f).unwrap();
            let rhs: f64 = x.iter().zip(&wtc).map(|(a, b)| a * b).sum();
            assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn level_bounds() {
        assert!(matches!(
            ndwt(&[0.0; 8], &WaveletFilter::haar(), 4),
            Err(Error::TooManyLevels { max: 3, .. })
        ));
    }
}
