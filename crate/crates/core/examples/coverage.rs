//! Empirical coverage of the credible bands for a smooth single-scale
//! spectrum. Zero-power scales count how often the band contains zero.
//!
//! ```text
//! cargo run --release --example coverage
//! ```

use lswspec::estimator::coverage_check;
use lswspec::lsw::single_scale_spectrum;
use lswspec::EstimateConfig;

fn main() -> lswspec::Result<()> {
    let truth = single_scale_spectrum(512, 5, 1.0)?;
    let cfg = EstimateConfig {
        spins: 8,
        samples: 200,
        ..Default::default()
    };
    let report = coverage_check(4, &truth, &cfg, 5)?;
    println!("scale  cov50  cov90");
    for j in 0..truth.levels() {
        println!(
            "{:>5} {:6.3} {:6.3}{}",
            j + 1,
            report.coverage[0][j],
            report.coverage[1][j],
            if j + 1 == 5 { "  <- signal" } else { "" }
        );
    }
    Ok(())
}
