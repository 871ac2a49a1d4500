//! A small AMSE comparison of the Bayesian Haar-Fisz estimator, the TI
//! de-noising baseline and the raw corrected periodogram. The command-line
//! `benchmark` runs the full filter grid with 100 replicates.
//!
//! ```text
//! cargo run --release --example benchmark
//! ```

use lswspec::estimator::{benchmark, BenchmarkConfig};
use lswspec::io::format_benchmark_table;
use lswspec::lsw::test_spectrum;
use lswspec::WaveletFilter;

fn main() -> lswspec::Result<()> {
    let cfg = BenchmarkConfig {
        replicates: 10,
        spectrum: test_spectrum(512)?,
        analysis: WaveletFilter::haar(),
        smoothing: vec!["ep1".parse()?, "ep10".parse()?, "la6".parse()?],
        spins: 8,
        seed: 1,
    };
    let report = benchmark(&cfg)?;
    println!("{:<6} {:<6} {:>9} {:>9} {:>8}", "method", "filter", "AMSE", "s.e.", "secs");
    for r in &report.rows {
        println!(
            "{:<6} {:<6} {:>9.5} {:>9.5} {:>8.2}",
            r.method.label(),
            r.smoothing.as_deref().unwrap_or("-"),
            r.amse,
            r.std_error,
            r.runtime_secs
        );
    }
    println!("\n{}", format_benchmark_table(&report, &vec![("seed".into(), "1".into())]));
    Ok(())
}
