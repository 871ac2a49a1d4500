//! Daubechies filters, decimated and non-decimated periodic wavelet
//! transforms, autocorrelation wavelets and the inner-product matrix `A_J`.
//!
//! All transforms use periodic boundary handling. The non-decimated
//! transform is aligned so that row `j` at location `k` reads the series
//! forward from `k`:
//!
//! ```text
//! d_j[k] = Σ_n ψ_j[n] x[(k + n) mod T]
//! ```
//!
//! which makes it exactly translation-equivariant and makes every
//! `2^j`-th entry equal to the decimated detail coefficient.

mod acw;
mod dwt;
mod filter;
mod ndwt;

pub use acw::{autocorrelation_wavelet, discrete_wavelet, Acw, AcwTable, InnerProductMatrix};
pub use dwt::{dwt, idwt, DwtCoefficients};
pub use filter::{supported_specs, Family, WaveletFilter};
pub use ndwt::{ndwt, ndwt_adjoint, ndwt_full, Ndwt};
