use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::wavelet::WaveletFilter;

const MAX_CONDITION: f64 = 1e12;

/// Discrete wavelet vector `ψ_j` (scale `j ≥ 1`) built by the cascade
/// `φ_j = Σ_k h_k φ_{j-1}(· - 2^{j-1}k)`, `ψ_j = Σ_k g_k φ_{j-1}(· - 2^{j-1}k)`.
/// Its length is the support length `L_j`.
pub fn discrete_wavelet(filter: &WaveletFilter, j: usize) -> Result<Vec<f64>> {
    if j == 0 {
        return Err(Error::InvalidScale(j));
    }
    let mut phi = vec![1.0];
    for level in 1..j {
        phi = upsampled_convolve(filter.lowpass(), 1 << (level - 1), &phi);
    }
    Ok(upsampled_convolve(filter.highpass(), 1 << (j - 1), &phi))
}

fn upsampled_convolve(taps: &[f64], step: usize, base: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; base.len() + step * (taps.len() - 1)];
    for (k, &t) in taps.iter().enumerate() {
        for (n, &b) in base.iter().enumerate() {
            out[n + step * k] += t * b;
        }
    }
    out
}

/// Autocorrelation wavelet `Ψ_j(τ) = Σ_k ψ_j[k] ψ_j[k - τ]` at one scale.
///
/// Stored for lags `-w..=w`; zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct Acw {
    scale: usize,
    values: Vec<f64>,
}

impl Acw {
    pub fn scale(&self) -> usize {
        self.scale
    }

    /// Largest lag with a (possibly) nonzero value; the support has
    /// `2 * half_width + 1 = 2 L_j - 1` points.
    pub fn half_width(&self) -> usize {
        self.values.len() / 2
    }

    pub fn at(&self, tau: isize) -> f64 {
        let w = self.half_width() as isize;
        if tau.abs() > w {
            0.0
        } else {
            self.values[(tau + w) as usize]
        }
    }

    /// Values for lags `-w..=w`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `Σ_τ Ψ_j(τ) Ψ_l(τ)`.
    pub fn inner(&self, other: &Acw) -> f64 {
        let w = self.half_width().min(other.half_width()) as isize;
        (-w..=w).map(|t| self.at(t) * other.at(t)).sum()
    }
}

fn autocorrelate(taps: &[f64]) -> Vec<f64> {
    let n = taps.len();
    (0..2 * n - 1)
        .map(|idx| {
            let lag = idx as isize - (n as isize - 1);
            (0..n as isize)
                .filter(|&k| k - lag >= 0 && k - lag < n as isize)
                .map(|k| taps[k as usize] * taps[(k - lag) as usize])
                .sum()
        })
        .collect()
}

/// Convolve a centred symmetric sequence with a centred filter
/// autocorrelation upsampled by `step`.
fn upsampled_symmetric_convolve(corr: &[f64], step: usize, base: &[f64]) -> Vec<f64> {
    let cw = corr.len() / 2;
    let bw = base.len() / 2;
    let w = bw + step * cw;
    let mut out = vec![0.0; 2 * w + 1];
    for (m, &r) in corr.iter().enumerate() {
        if r == 0.0 {
            continue;
        }
        let offset = step * m;
        for (n, &b) in base.iter().enumerate() {
            out[n + offset] += r * b;
        }
    }
    out
}

/// ACWs for scales `1..=levels`, built by the recursion
/// `Ψ_j = ↑_{2^{j-1}}(r_g) ⋆ Φ_{j-1}`, `Φ_j = ↑_{2^{j-1}}(r_h) ⋆ Φ_{j-1}`
/// on filter autocorrelations, which costs `O(L_j · L₁)` per scale.
fn acw_rows(filter: &WaveletFilter, levels: usize) -> Vec<Acw> {
    let rh = autocorrelate(filter.lowpass());
    let rg = autocorrelate(filter.highpass());
    let mut phi = vec![1.0];
    let mut rows = Vec::with_capacity(levels);
    for j in 1..=levels {
        let step = 1 << (j - 1);
        let mut psi = upsampled_symmetric_convolve(&rg, step, &phi);
        symmetrize(&mut psi);
        rows.push(Acw {
            scale: j,
            values: psi,
        });
        if j < levels {
            phi = upsampled_symmetric_convolve(&rh, step, &phi);
        }
    }
    rows
}

fn symmetrize(v: &mut [f64]) {
    let n = v.len();
    for i in 0..n / 2 {
        let m = 0.5 * (v[i] + v[n - 1 - i]);
        v[i] = m;
        v[n - 1 - i] = m;
    }
}

pub fn autocorrelation_wavelet(filter: &WaveletFilter, j: usize) -> Result<Acw> {
    if j == 0 {
        return Err(Error::InvalidScale(j));
    }
    Ok(acw_rows(filter, j).pop().expect("j ≥ 1"))
}

/// ACWs for every scale `1..=J` of one filter.
#[derive(Debug, Clone)]
pub struct AcwTable {
    rows: Vec<Acw>,
}

impl AcwTable {
    pub fn new(filter: &WaveletFilter, levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::InvalidScale(0));
        }
        Ok(Self {
            rows: acw_rows(filter, levels),
        })
    }

    pub fn levels(&self) -> usize {
        self.rows.len()
    }

    /// Row for scale `j` (1-based).
    pub fn scale(&self, j: usize) -> &Acw {
        &self.rows[j - 1]
    }
}

/// The `J × J` Gram matrix `A_{j,l} = ⟨Ψ_j, Ψ_l⟩` and its inverse.
///
/// Scales are 1-based in the accessors; row/column `j - 1` of the stored
/// matrices is scale `j`.
#[derive(Debug, Clone)]
pub struct InnerProductMatrix {
    filter: String,
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
    condition: f64,
}

impl InnerProductMatrix {
    pub fn new(filter: &WaveletFilter, levels: usize) -> Result<Self> {
        let table = AcwTable::new(filter, levels)?;
        Self::from_table(filter.name(), &table)
    }

    pub fn from_table(filter: String, table: &AcwTable) -> Result<Self> {
        let levels = table.levels();
        let mut matrix = DMatrix::zeros(levels, levels);
        for j in 0..levels {
            for l in 0..=j {
                let v = table.rows[j].inner(&table.rows[l]);
                matrix[(j, l)] = v;
                matrix[(l, j)] = v;
            }
        }
        Self::from_matrix(filter, matrix)
    }

    fn from_matrix(filter: String, matrix: DMatrix<f64>) -> Result<Self> {
        let levels = matrix.nrows();
        let sv = matrix.clone().singular_values();
        let smax = sv.iter().copied().fold(0.0, f64::max);
        let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        let singular = || Error::SingularInnerProduct {
            levels,
            filter: filter.clone(),
            condition,
        };
        // also rejects a NaN condition number
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(condition <= MAX_CONDITION) {
            return Err(singular());
        }
        let inverse = matrix.clone().lu().try_inverse().ok_or_else(singular)?;
        Ok(Self {
            filter,
            matrix,
            inverse,
            condition,
        })
    }

    pub fn levels(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn filter_name(&self) -> &str {
        &self.filter
    }

    /// `A_{j,l}` for 1-based scales.
    pub fn get(&self, j: usize, l: usize) -> f64 {
        self.matrix[(j - 1, l - 1)]
    }

    /// `(A⁻¹)_{j,l}` for 1-based scales.
    pub fn inverse_get(&self, j: usize, l: usize) -> f64 {
        self.inverse[(j - 1, l - 1)]
    }

    /// 2-norm condition number from the singular values.
    pub fn condition_number(&self) -> f64 {
        self.condition
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    /// `A v` for a vector indexed by scale.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (&self.matrix * DVector::from_column_slice(v)).iter().copied().collect()
    }

    /// `A⁻¹ v`.
    pub fn apply_inverse(&self, v: &[f64]) -> Vec<f64> {
        (&self.inverse * DVector::from_column_slice(v)).iter().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::{idwt, DwtCoefficients};

    #[test]
    fn haar_finest_acw() {
        let acw = autocorrelation_wavelet(&WaveletFilter::haar(), 1).unwrap();
        assert!((acw.at(0) - 1.0).abs() < 1e-15);
        assert!((acw.at(1) + 0.5).abs() < 1e-15);
        assert!((acw.at(-1) + 0.5).abs() < 1e-15);
        assert_eq!(acw.at(2), 0.0);
    }

    #[test]
    fn acw_shape_properties() {
        for f in WaveletFilter::all() {
            let table = AcwTable::new(&f, 5).unwrap();
            for j in 1..=5 {
                let a = table.scale(j);
                assert!((a.at(0) - 1.0).abs() < 1e-12);
                assert_eq!(a.values().len(), 2 * f.support_length(j) - 1);
                let w = a.half_width() as isize;
                let mut alt = 0.0;
                for t in -w..=w {
                    assert_eq!(a.at(t), a.at(-t));
                    alt += if t.rem_euclid(2) == 0 { 1.0 } else { -1.0 } * a.at(t);
                }
                assert!(alt >= -1e-12);
            }
        }
    }

    #[test]
    fn acw_matches_direct_autocorrelation_of_cascade() {
        for f in WaveletFilter::all() {
            for j in 1..=4 {
                let psi = discrete_wavelet(&f, j).unwrap();
                let direct = autocorrelate(&psi);
                let rec = autocorrelation_wavelet(&f, j).unwrap();
                assert_eq!(direct.len(), rec.values().len());
                for (a, b) in direct.iter().zip(rec.values()) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn cascade_matches_dwt_basis_vector() {
        // ψ_j is the inverse DWT of a unit detail coefficient
        let f: WaveletFilter = "ep3".parse().unwrap();
        let n = 256;
        for j in 1..=3 {
            let mut coeffs = DwtCoefficients {
                details: (0..8).map(|l| vec![0.0; 1 << l]).collect(),
                scaling: 0.0,
            };
            coeffs.details[8 - j][0] = 1.0;
            let basis = idwt(&coeffs, &f).unwrap();
            let psi = discrete_wavelet(&f, j).unwrap();
            for (t, &b) in basis.iter().enumerate() {
                let p = psi.get(t).copied().unwrap_or(0.0);
                assert!((b - p).abs() < 1e-12, "j={j} t={t}");
            }
            assert!(psi.len() < n);
        }
    }

    #[test]
    fn haar_inner_product_entry() {
        let a = InnerProductMatrix::new(&WaveletFilter::haar(), 4).unwrap();
        assert!((a.get(1, 1) - 1.5).abs() < 1e-14);
    }

    #[test]
    fn inner_product_matrix_properties() {
        for f in WaveletFilter::all() {
            let a = InnerProductMatrix::new(&f, 10).unwrap();
            let prod = a.matrix() * a.inverse();
            for j in 0..10 {
                for l in 0..10 {
                    assert_eq!(a.matrix()[(j, l)], a.matrix()[(l, j)]);
                    // far off-diagonal entries of long filters sit at rounding level
                    assert!(a.matrix()[(j, l)] > -1e-14, "{} A[{j},{l}]", f.name());
                    let target = if j == l { 1.0 } else { 0.0 };
                    assert!((prod[(j, l)] - target).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn scale_zero_is_invalid() {
        assert!(autocorrelation_wavelet(&WaveletFilter::haar(), 0).is_err());
        assert!(discrete_wavelet(&WaveletFilter::haar(), 0).is_err());
    }
}
