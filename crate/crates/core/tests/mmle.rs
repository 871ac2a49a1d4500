use lswspec::shrink::{fit_level, fit_mmle, initial_nu, marginal_loglik, ALPHA_START};
use lswspec::wavelet::DwtCoefficients;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};

fn prior_sample(n: usize, alpha: f64, tau: f64, nu: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let lap = Exp::new(tau).unwrap();
    let noise = Normal::new(0.0, nu).unwrap();
    (0..n)
        .map(|_| {
            let beta = if rng.random::<f64>() < alpha {
                0.0
            } else {
                let m: f64 = lap.sample(rng);
                if rng.random::<bool>() { m } else { -m }
            };
            beta + noise.sample(rng)
        })
        .collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    0.5 * (v[(n - 1) / 2] + v[n / 2])
}

#[test]
fn recovers_prior_parameters() {
    let (alpha, tau, nu) = (0.8, 0.5, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut errs = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..20 {
        let h = prior_sample(2048, alpha, tau, nu, &mut rng);
        let p = fit_level(&h, initial_nu(&h)).unwrap();
        errs.0.push((p.alpha - alpha).abs());
        errs.1.push((p.tau / tau - 1.0).abs());
        errs.2.push((p.nu / nu - 1.0).abs());
    }
    let (ea, et, en) = (median(errs.0), median(errs.1), median(errs.2));
    assert!(ea <= 0.1, "alpha error {ea}");
    assert!(et <= 0.3, "tau error {et}");
    assert!(en <= 0.3, "nu error {en}");
}

#[test]
fn pure_noise_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut inside = 0;
    for _ in 0..50 {
        let h: Vec<f64> = (0..1024).map(|_| normal.sample(&mut rng)).collect();
        let p = fit_level(&h, initial_nu(&h)).unwrap();
        if (0.85..=1.15).contains(&p.nu) {
            inside += 1;
        }
    }
    assert!(inside >= 45, "{inside}/50");
}

#[test]
fn fit_improves_on_start_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for n in [15, 64, 512] {
        let h = prior_sample(n, 0.5, 0.3, 0.7, &mut rng);
        let nu0 = initial_nu(&h);
        let sd = (h.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
        let start = marginal_loglik(&h, ALPHA_START, 1.0 / sd, nu0).unwrap();
        let p = fit_level(&h, nu0).unwrap();
        assert!(marginal_loglik(&h, p.alpha, p.tau, p.nu).unwrap() >= start);
    }
}

#[test]
fn pooled_levels_follow_the_scaling_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let details: Vec<Vec<f64>> = (0..7).map(|l| prior_sample(1 << l, 0.6, 0.5, 1.0, &mut rng)).collect();
    let hp = fit_mmle(&DwtCoefficients { details, scaling: 3.0 }).unwrap();
    assert_eq!(hp.levels.len(), 7);
    for l in 0..3 {
        let (c, f) = (hp.level(l), hp.level(l + 1));
        assert!((f.tau / c.tau - 2.0).abs() < 1e-12 || c.tau > f.tau / 2.0);
        assert_eq!(c.nu, f.nu);
        if c.alpha < lswspec::shrink::ALPHA_MAX {
            assert!((c.theta() / f.theta() - 2.0).abs() < 1e-9);
        }
    }
    let short = DwtCoefficients { details: (0..4).map(|l| vec![0.0; 1 << l]).collect(), scaling: 0.0 };
    assert!(fit_mmle(&short).is_err());
}
