//! The spike-and-Laplace-slab posterior: shrinkage curve, hyperparameter
//! fitting by marginal maximum likelihood, and posterior sampling.
//!
//! ```text
//! cargo run --release --example shrinkage
//! ```

use lswspec::shrink::{fit_level, posterior_moments, q_integrals, sample_posterior, LevelParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

fn main() -> lswspec::Result<()> {
    let q = q_integrals(0.0, 1.0, 1.0);
    println!("Q0(0; tau=1, nu=1) = {:.8}", q.q0);

    // A heavy spike (theta = 5) with a wide slab: small inputs are set to
    // zero, large ones pass almost unchanged.
    let params = LevelParams::new(0.5, 0.01, 1.0).with_theta(5.0);
    println!("   h   E[beta|h]  sd     P(beta=0|h)");
    for h in [0.0, 1.0, 2.0, 3.0, 4.0, 6.0, 10.0] {
        let m = posterior_moments(h, &params);
        println!("{h:5.1} {:9.4} {:6.3} {:9.4}", m.mean, m.variance.sqrt(), m.spike_weight);
    }

    // Recover hyperparameters from data drawn from the prior plus noise.
    let (alpha, tau, nu) = (0.8, 0.5, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let laplace = Exp::new(tau).expect("positive rate");
    let coeffs: Vec<f64> = (0..2048)
        .map(|_| {
            let beta = if rng.random::<f64>() < alpha {
                0.0
            } else {
                let mag: f64 = laplace.sample(&mut rng);
                if rng.random::<bool>() { mag } else { -mag }
            };
            let e: f64 = StandardNormal.sample(&mut rng);
            beta + nu * e
        })
        .collect();
    let fit = fit_level(&coeffs, 1.0)?;
    println!("fitted alpha {:.3} tau {:.3} nu {:.3} (truth {alpha} {tau} {nu})", fit.alpha, fit.tau, fit.nu);

    // Posterior draws agree with the closed-form moments.
    let fig = LevelParams::new(0.25, 3f64.sqrt(), 1.0);
    let exact = posterior_moments(0.5, &fig);
    let draws: Vec<f64> = (0..100_000).map(|_| sample_posterior(0.5, &fig, &mut rng)).collect();
    let mean = draws.iter().sum::<f64>() / draws.len() as f64;
    let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
    println!("h=1/2: mean {mean:.4} (exact {:.4}), variance {var:.4} (exact {:.4})", exact.mean, exact.variance);
    Ok(())
}
