mod support;

use fnirs_core::classifiers::{train, AlgoSpec, Family, ModelParams};
use fnirs_core::evaluation::{compute_metrics, roc_curve, ConfusionMatrix};
use fnirs_core::features::{fft_magnitudes, pca_component};
use fnirs_core::Label;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use support::oracles;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_labels(r: &mut ChaCha8Rng, n: usize) -> Vec<Label> {
    loop {
        let y: Vec<Label> = (0..n).map(|_| if r.random_bool(0.5) { Label::Task } else { Label::Rest }).collect();
        if y.iter().any(|l| l.is_task()) && y.iter().any(|l| !l.is_task()) {
            return y;
        }
    }
}

#[test]
fn fft_matches_naive_dft() {
    let mut r = rng(1);
    for _ in 0..100 {
        let n = r.random_range(2..300);
        let x: Vec<f64> = (0..n).map(|_| r.sample::<f64, _>(StandardNormal) * 10.0).collect();
        let fast = fft_magnitudes(&x).unwrap();
        let slow = oracles::naive_dft_magnitudes(&x);
        let scale = slow.iter().fold(0.0f64, |m, v| m.max(*v));
        let err = fast.iter().zip(&slow).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-9 * scale, "n={n} err={err} scale={scale}");
    }
}

#[test]
fn pca_component_matches_power_iteration() {
    let mut r = rng(2);
    for _ in 0..100 {
        let n = r.random_range(30..200);
        let mut walk = 0.0;
        let x: Vec<f64> = (0..n)
            .map(|_| {
                walk += r.sample::<f64, _>(StandardNormal);
                walk
            })
            .collect();
        let ours = pca_component(&x, 10).unwrap();
        let oracle = oracles::power_iteration_component(&x, 10);
        let scale = oracle.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let same = ours.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let flipped = ours.iter().zip(&oracle).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max);
        assert!(same.min(flipped) <= 1e-8 * scale, "n={n}: {same} / {flipped}");
    }
}

#[test]
fn lda_weights_match_gaussian_elimination() {
    let mut r = rng(3);
    for _ in 0..200 {
        let d = r.random_range(1..=3);
        let n = r.random_range(d + 3..=20);
        let y = random_labels(&mut r, n);
        let rows: Vec<Vec<f64>> = y
            .iter()
            .map(|l| (0..d).map(|j| r.sample::<f64, _>(StandardNormal) + if l.is_task() { j as f64 } else { 0.0 }).collect())
            .collect();
        let x = Array2::from_shape_vec((n, d), rows.concat()).unwrap();
        let model = train(&AlgoSpec::new(Family::Lda), x.view(), &y).unwrap();
        let ModelParams::Lda(lda) = &model.params else { panic!("not an LDA model") };
        let oracle = oracles::lda_weights(&rows, &y, 1e-6);
        let scale = oracle.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in lda.weights.iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-8 * scale, "{a} vs {b}");
        }
    }
}

#[test]
fn metrics_match_counting() {
    let mut r = rng(4);
    for _ in 0..500 {
        let n = r.random_range(4..100);
        let truth = random_labels(&mut r, n);
        let predicted = random_labels(&mut r, n);
        let m = compute_metrics(&ConfusionMatrix::from_predictions(&truth, &predicted)).unwrap();
        let c = oracles::count_metrics(&truth, &predicted);
        assert_eq!(m.accuracy, c.accuracy);
        assert_eq!(m.tpr, c.tpr);
        assert_eq!(m.tnr, c.tnr);
        // same rationals, different evaluation order
        assert!((m.f1 - c.f1).abs() <= 4.0 * f64::EPSILON, "{} vs {}", m.f1, c.f1);
        assert!((m.kappa - c.kappa).abs() <= 16.0 * f64::EPSILON, "{} vs {}", m.kappa, c.kappa);
    }
}

#[test]
fn auc_matches_mann_whitney() {
    let mut r = rng(5);
    for _ in 0..200 {
        let n = r.random_range(2..150);
        let y = random_labels(&mut r, n);
        // coarse rounding forces ties
        let s: Vec<f64> = (0..n).map(|_| (r.sample::<f64, _>(StandardNormal) * 4.0).round() / 4.0).collect();
        let roc = roc_curve(&y, &s).unwrap();
        assert!((roc.auc - oracles::mann_whitney_auc(&y, &s)).abs() < 1e-12);
    }
}
