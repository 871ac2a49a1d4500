//! Daubechies filters, the decimated and non-decimated transforms, and the
//! inner-product matrix used for bias correction.
//!
//! ```text
//! cargo run --example wavelets
//! ```

use lswspec::wavelet::{autocorrelation_wavelet, dwt, idwt, ndwt, supported_specs, InnerProductMatrix};
use lswspec::WaveletFilter;

fn main() -> lswspec::Result<()> {
    println!("supported filters: {}", supported_specs());
    for spec in ["haar", "ep4", "la8"] {
        let f: WaveletFilter = spec.parse()?;
        println!("{:>5}: {} taps {:?}", f.name(), f.len(), &f.lowpass()[..2]);
    }

    // Perfect reconstruction on a chirp.
    let la8: WaveletFilter = "la8".parse()?;
    let x: Vec<f64> = (0..256).map(|t| (0.0005 * (t * t) as f64).sin()).collect();
    let c = dwt(&x, &la8)?;
    let back = idwt(&c, &la8)?;
    let err = x.iter().zip(&back).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    println!("DWT round trip max error {err:.2e}, energy {:.6} vs {:.6}", c.energy(), x.iter().map(|v| v * v).sum::<f64>());

    // The NDWT keeps every shift: J rows of length T, finest first.
    let rows = ndwt(&x, &la8, 3)?;
    println!("NDWT rows: {} x {}", rows.len(), rows[0].len());

    let psi1 = autocorrelation_wavelet(&WaveletFilter::haar(), 1)?;
    println!("Haar Psi_1(0), Psi_1(1) = {}, {}", psi1.at(0), psi1.at(1));

    let a = InnerProductMatrix::new(&WaveletFilter::haar(), 5)?;
    println!("Haar A (J=5), condition number {:.1}:", a.condition_number());
    for j in 1..=5 {
        let row: Vec<String> = (1..=5).map(|l| format!("{:8.4}", a.get(j, l))).collect();
        println!("  {}", row.join(" "));
    }
    Ok(())
}
