use crate::error::{Error, Result};
use crate::wavelet::WaveletFilter;

/// Periodic orthonormal DWT coefficients.
///
/// `details[l]` holds the `2^l` coefficients of level `l`, with `l = 0` the
/// coarsest. Together with the single scaling coefficient this is exactly
/// `T = 2^J` numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct DwtCoefficients {
    pub details: Vec<Vec<f64>>,
    pub scaling: f64,
}

impl DwtCoefficients {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Length of the series these coefficients describe.
    pub fn len(&self) -> usize {
        1 << self.details.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn energy(&self) -> f64 {
        self.scaling * self.scaling
            + self
                .details
                .iter()
                .flat_map(|d| d.iter())
                .map(|v| v * v)
                .sum::<f64>()
    }
}

/// Full-depth periodic DWT of a length-`2^J` signal.
pub fn dwt(signal: &[f64], filter: &WaveletFilter) -> Result<DwtCoefficients> {
    let levels = crate::dyadic_levels(signal.len())?;
    let h = filter.lowpass();
    let g = filter.highpass();
    let mut approx = signal.to_vec();
    let mut details = vec![Vec::new(); levels];
    for l in (0..levels).rev() {
        let n = approx.len();
        let half = n / 2;
        let mut next = vec![0.0; half];
        let mut det = vec![0.0; half];
        for k in 0..half {
            let (mut a, mut d) = (0.0, 0.0);
            for (i, (&hi, &gi)) in h.iter().zip(g).enumerate() {
                let v = approx[(2 * k + i) % n];
                a += hi * v;
                d += gi * v;
            }
            next[k] = a;
            det[k] = d;
        }
        details[l] = det;
        approx = next;
    }
    Ok(DwtCoefficients {
        details,
        scaling: approx[0],
    })
}

/// Inverse of [`dwt`].
pub fn idwt(coeffs: &DwtCoefficients, filter: &WaveletFilter) -> Result<Vec<f64>> {
    for (l, d) in coeffs.details.iter().enumerate() {
        if d.len() != 1 << l {
            return Err(Error::DimensionMismatch {
                expected: format!("{} coefficients at level {l}", 1 << l),
                found: d.len().to_string(),
            });
        }
    }
    let h = filter.lowpass();
    let g = filter.highpass();
    let mut approx = vec![coeffs.scaling];
    for det in &coeffs.details {
        let half = approx.len();
        let n = 2 * half;
        let mut out = vec![0.0; n];
        for k in 0..half {
            let (a, d) = (approx[k], det[k]);
            for (i, (&hi, &gi)) in h.iter().zip(g).enumerate() {
                out[(2 * k + i) % n] += hi * a + gi * d;
            }
        }
        approx = out;
    }
    Ok(approx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn perfect_reconstruction_every_filter() {
        let x = gaussian(256, 1);
        for f in WaveletFilter::all() {
            let back = idwt(&dwt(&x, &f).unwrap(), &f).unwrap();
            let err = x.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-10, "{}: {err}", f.name());
        }
    }

    #[test]
    fn constant_signal_has_no_detail() {
        let c = 1.7;
        for f in WaveletFilter::all() {
            let d = dwt(&vec![c; 64], &f).unwrap();
            assert!(d.details.iter().flatten().all(|v| v.abs() < 1e-12), "{}", f.name());
            assert!((d.scaling - c * 8.0).abs() < 1e-11);
        }
    }

    #[test]
    fn parseval() {
        let x = gaussian(1024, 2);
        let e: f64 = x.iter().map(|v| v * v).sum();
        for f in WaveletFilter::all() {
            let d = dwt(&x, &f).unwrap();
            assert!((d.energy() - e).abs() < 1e-10 * e);
            assert_eq!(d.details[3].len(), 8);
        }
    }

    #[test]
    fn non_dyadic_rejected() {
        assert!(matches!(
            dwt(&[1.0; 12], &WaveletFilter::haar()),
            Err(Error::NonDyadicLength(12))
        ));
    }
}
