//! Simulates an LSW process from the built-in test spectrum and compares the
//! raw wavelet periodogram with its expectation `A S`.
//!
//! ```text
//! cargo run --release --example simulate_periodogram
//! ```

use lswspec::lsw::{correct_spectrum, expected_periodogram, raw_wavelet_periodogram, simulate_lsw, test_spectrum};
use lswspec::{InnerProductMatrix, WaveletFilter};

fn main() -> lswspec::Result<()> {
    let haar = WaveletFilter::haar();
    let truth = test_spectrum(1024)?;
    let a = InnerProductMatrix::new(&haar, truth.levels())?;
    let expected = expected_periodogram(&truth, &a)?;

    let reps = 200;
    let mut mean = vec![vec![0.0; truth.len()]; truth.levels()];
    for seed in 0..reps {
        let x = simulate_lsw(&truth, &haar, seed)?;
        let p = raw_wavelet_periodogram(&x, &haar)?;
        for (m, row) in mean.iter_mut().zip(&p.values) {
            m.iter_mut().zip(row).for_each(|(m, v)| *m += v / reps as f64);
        }
    }

    println!("scale  true S   E[I]=AS  mean I ({reps} reps)   at z = 0.6");
    let k = (0.6 * truth.len() as f64) as usize;
    for j in 0..truth.levels() {
        println!("{:>5} {:8.4} {:9.4} {:9.4}", j + 1, truth.rows()[j][k], expected[j][k], mean[j][k]);
    }

    // A⁻¹ undoes the leakage between scales, on average.
    let corrected = correct_spectrum(&mean, &a)?;
    let err = corrected
        .iter()
        .zip(truth.rows())
        .flat_map(|(c, t)| c.iter().zip(t).map(|(a, b)| (a - b).powi(2)))
        .sum::<f64>()
        / (truth.levels() * truth.len()) as f64;
    println!("MSE of A^-1 (mean periodogram) vs truth: {err:.5}");
    Ok(())
}
