mod common;

use lswspec::lsw::{
    correct_spectrum, expected_periodogram, periodogram_variance, raw_wavelet_periodogram, simulate_lsw_with,
    test_spectrum, Ews, TEST_SPECTRUM_MID_SCALE,
};
use lswspec::wavelet::{InnerProductMatrix, WaveletFilter};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn finest_scale_haar_autocovariance() {
    let haar = WaveletFilter::haar();
    let n = 64;
    let ews = Ews::from_fn(n, |j, _| if j == 1 { 1.0 } else { 0.0 }).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let t = n / 2;
    let (mut x0, mut c0, mut c1) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..10_000 {
        let x = simulate_lsw_with(&ews, &haar, &mut rng).unwrap();
        x0.push(x[t]);
        c0.push(x[t] * x[t]);
        c1.push(x[t] * x[t + 1]);
    }
    let m = common::summarize(&x0);
    assert!(m.mean.abs() < 3.0 * m.mean_se(), "mean {}", m.mean);
    // c(0) = Ψ₁(0) = 1, c(1) = Ψ₁(1) = −1/2
    for (values, expect) in [(c0, 1.0), (c1, -0.5)] {
        let s = common::summarize(&values);
        assert!((s.mean - expect).abs() < 3.0 * s.mean_se(), "{} vs {expect}", s.mean);
    }
}

#[test]
fn periodogram_mean_tracks_expectation_cellwise() {
    // nonstationary: expectation varies in time
    let haar = WaveletFilter::haar();
    let n = 128;
    let ews = Ews::from_fn(n, |j, z| if j <= 2 { 1.0 + z } else { 0.0 }).unwrap();
    let a = InnerProductMatrix::new(&haar, 7).unwrap();
    let expect = expected_periodogram(&ews, &a).unwrap();
    let reps = 4000;
    let mut sum = vec![vec![0.0; n]; 2];
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..reps {
        let x = simulate_lsw_with(&ews, &haar, &mut rng).unwrap();
        let p = raw_wavelet_periodogram(&x, &haar).unwrap();
        for (s, row) in sum.iter_mut().zip(&p.values) {
            s.iter_mut().zip(row).for_each(|(a, v)| *a += v);
        }
    }
    // average over blocks of 16 locations to tame Monte Carlo noise; the
    // O(1/T) term is what remains
    for j in 0..2 {
        for b in 0..n / 16 {
            let mc: f64 = (b * 16..(b + 1) * 16).map(|k| sum[j][k] / reps as f64).sum::<f64>() / 16.0;
            let ex: f64 = (b * 16..(b + 1) * 16).map(|k| expect[j][k]).sum::<f64>() / 16.0;
            assert!((mc / ex - 1.0).abs() < 0.1, "j={} block {b}: {mc} vs {ex}", j + 1);
        }
    }
}

#[test]
fn variance_helper_is_twice_mean_squared() {
    let f: WaveletFilter = "la8".parse().unwrap();
    let ews = test_spectrum(256).unwrap();
    let a = InnerProductMatrix::new(&f, 8).unwrap();
    let mean = expected_periodogram(&ews, &a).unwrap();
    let var = periodogram_variance(&ews, &a).unwrap();
    for (m, v) in mean.iter().flatten().zip(var.iter().flatten()) {
        assert_eq!(*v, 2.0 * m * m);
    }
}

#[test]
fn zero_spectrum_cases() {
    let haar = WaveletFilter::haar();
    let zero = Ews::zeros(64).unwrap();
    let a = InnerProductMatrix::new(&haar, 6).unwrap();
    assert!(expected_periodogram(&zero, &a).unwrap().iter().flatten().all(|v| *v == 0.0));
    let rows = vec![vec![0.0; 64]; 6];
    assert!(correct_spectrum(&rows, &a).unwrap().iter().flatten().all(|v| *v == 0.0));
}

#[test]
fn test_spectrum_layout() {
    let ews = test_spectrum(1024).unwrap();
    assert!(ews.rows().iter().flatten().all(|v| *v >= 0.0));
    let powered: Vec<usize> = (0..ews.levels())
        .filter(|&j| ews.rows()[j].iter().any(|v| *v > 0.0))
        .map(|j| j + 1)
        .collect();
    assert_eq!(powered, vec![1, TEST_SPECTRUM_MID_SCALE]);
    let burst: Vec<usize> = (0..1024).filter(|&k| ews.rows()[0][k] > 0.0).collect();
    assert!(burst.windows(2).all(|w| w[1] == w[0] + 1), "burst not contiguous");
}

fn spectrum() -> impl Strategy<Value = (usize, Vec<Vec<f64>>)> {
    (3u32..=7).prop_flat_map(|levels| {
        let n = 1usize << levels;
        (Just(levels as usize), prop::collection::vec(prop::collection::vec(0.0f64..5.0, n), levels as usize))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn correction_inverts_expectation((levels, rows) in spectrum(), vm in 1usize..=10) {
        let f = WaveletFilter::new(lswspec::Family::ExtremalPhase, vm).unwrap();
        let ews = Ews::new(rows).unwrap();
        let a = InnerProductMatrix::new(&f, levels).unwrap();
        let back = correct_spectrum(&expected_periodogram(&ews, &a).unwrap(), &a).unwrap();
        for (x, y) in back.iter().flatten().zip(ews.rows().iter().flatten()) {
            prop_assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn periodogram_is_nonnegative((_, rows) in spectrum(), seed in any::<u64>()) {
        let haar = WaveletFilter::haar();
        let ews = Ews::new(rows).unwrap();
        let x = simulate_lsw_with(&ews, &haar, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let p = raw_wavelet_periodogram(&x, &haar).unwrap();
        prop_assert!(p.values.iter().flatten().all(|v| *v >= 0.0));
    }
}
