//! k-fold cross-validation and stratified holdout.
//!
//! Min-max parameters are always fitted on the training rows of a split and
//! then applied to both sides.

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::metrics::{compute_metrics, roc_curve, ConfusionMatrix, Metrics, RocCurve};
use crate::classifiers::{label_for_score, train, AlgoSpec};
use crate::error::{Error, Result};
use crate::features::{design_matrix, FeatureVector, MinMaxParams};
use crate::recording::Label;
use crate::seeded_rng;

/// How many times a class-absent fold assignment is re-dealt.
pub const MAX_DEALS: u64 = 10;

/// Seeded shuffle of 0..n dealt into k contiguous blocks; the first n mod k
/// folds hold one extra index.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 || k > n {
        return Err(Error::invalid(format!("need 2 <= k <= n, got k = {k}, n = {n}")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut seeded_rng(seed));
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(idx[start..start + len].to_vec());
        start += len;
    }
    Ok(folds)
}

/// What a fold's normalisation was fitted on; handed to instrumentation hooks.
pub struct FoldFit<'a> {
    pub fold: usize,
    pub train_indices: &'a [usize],
    pub test_indices: &'a [usize],
    pub params: &'a MinMaxParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: Metrics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub spec: AlgoSpec,
    pub k: usize,
    pub seed: u64,
    /// Seed of the accepted fold deal (seed + number of re-deals).
    pub effective_seed: u64,
    pub folds: Vec<FoldResult>,
    pub pooled_confusion: ConfusionMatrix,
    pub pooled_metrics: Metrics,
    pub accuracy_mean: f64,
    /// Sample standard deviation across folds.
    pub accuracy_sd: f64,
    pub roc: Option<RocCurve>,
    pub fold_assignments: Vec<Vec<usize>>,
}

fn both_classes(labels: &[Label], idx: impl Iterator<Item = usize>) -> bool {
    let (mut task, mut rest) = (false, false);
    for i in idx {
        if labels[i].is_task() {
            task = true;
        } else {
            rest = true;
        }
    }
    task && rest
}

pub(crate) fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, sd)
}

/// Normalise on `train_idx`, fit, and score `test_idx`.
fn fit_and_score(
    x: &Array2<f64>,
    y: &[Label],
    spec: &AlgoSpec,
    train_idx: &[usize],
    test_idx: &[usize],
    on_fit: impl FnOnce(&MinMaxParams),
) -> Result<Vec<f64>> {
    let x_train = x.select(Axis(0), train_idx);
    let x_test = x.select(Axis(0), test_idx);
    let params = MinMaxParams::fit_rows(x_train.view())?;
    on_fit(&params);
    let x_train = params.transform_rows(x_train.view())?;
    let x_test = params.transform_rows(x_test.view())?;
    let y_train: Vec<Label> = train_idx.iter().map(|&i| y[i]).collect();
    let model = train(spec, x_train.view(), &y_train)?;
    Ok(model.decision_scores(x_test.view())?.to_vec())
}

pub fn cross_validate(vectors: &[FeatureVector], spec: &AlgoSpec, k: usize, seed: u64) -> Result<CvResult> {
    cross_validate_with_hook(vectors, spec, k, seed, &mut |_| {})
}

/// [`cross_validate`] with a callback observing each fold's normalisation fit.
pub fn cross_validate_with_hook(
    vectors: &[FeatureVector],
    spec: &AlgoSpec,
    k: usize,
    seed: u64,
    hook: &mut dyn FnMut(FoldFit<'_>),
) -> Result<CvResult> {
    let (x, y) = design_matrix(vectors)?;
    let n = y.len();

    let mut accepted = None;
    for attempt in 0..MAX_DEALS {
        let s = seed.wrapping_add(attempt);
        let folds = kfold_split(n, k, s)?;
        let ok = folds.iter().all(|fold| {
            let mut in_fold = vec![false; n];
            fold.iter().for_each(|&i| in_fold[i] = true);
            both_classes(&y, (0..n).filter(|&i| !in_fold[i]))
        });
        if ok {
            accepted = Some((s, folds));
            break;
        }
    }
    let (effective_seed, folds) = accepted.ok_or_else(|| {
        Error::DegenerateTrainingSet(format!(
            "a training fold lacks one class after {MAX_DEALS} deals"
        ))
    })?;

    let mut pooled_confusion = ConfusionMatrix::default();
    let mut pooled_labels = Vec::with_capacity(n);
    let mut pooled_scores = Vec::with_capacity(n);
    let mut results = Vec::with_capacity(k);
    for (f, test_idx) in folds.iter().enumerate() {
        let mut in_fold = vec![false; n];
        test_idx.iter().for_each(|&i| in_fold[i] = true);
        let train_idx: Vec<usize> = (0..n).filter(|&i| !in_fold[i]).collect();
        let scores = fit_and_score(&x, &y, spec, &train_idx, test_idx, |params| {
            hook(FoldFit {
                fold: f,
                train_indices: &train_idx,
                test_indices: test_idx,
                params,
            })
        })?;
        let truth: Vec<Label> = test_idx.iter().map(|&i| y[i]).collect();
        let predicted: Vec<Label> = scores.iter().map(|&s| label_for_score(s)).collect();
        let confusion = ConfusionMatrix::from_predictions(&truth, &predicted);
        let mut metrics = compute_metrics(&confusion)?;
        metrics.auc = roc_curve(&truth, &scores).ok().map(|r| r.auc);
        pooled_confusion.merge(&confusion);
        pooled_labels.extend(truth);
        pooled_scores.extend(scores);
        results.push(FoldResult {
            fold: f,
            n_train: train_idx.len(),
            n_test: test_idx.len(),
            confusion,
            metrics,
        });
    }

    let roc = roc_curve(&pooled_labels, &pooled_scores).ok();
    let mut pooled_metrics = compute_metrics(&pooled_confusion)?;
    pooled_metrics.auc = roc.as_ref().map(|r| r.auc);
    let accs: Vec<f64> = results.iter().map(|r| r.metrics.accuracy).collect();
    let (accuracy_mean, accuracy_sd) = mean_sd(&accs);
    Ok(CvResult {
        spec: spec.clone(),
        k,
        seed,
        effective_seed,
        folds: results,
        pooled_confusion,
        pooled_metrics,
        accuracy_mean,
        accuracy_sd,
        roc,
        fold_assignments: folds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoldoutResult {
    pub spec: AlgoSpec,
    pub train_fraction: f64,
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: Metrics,
    pub roc: Option<RocCurve>,
    pub test_indices: Vec<usize>,
}

/// Per class, round(train_fraction · n_class) seeded-shuffled indices go to
/// training. Returns sorted (train, test) index lists.
pub fn stratified_split(labels: &[Label], train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "train_fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for class in [Label::Task, Label::Rest] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        let n_train = (train_fraction * idx.len() as f64).round() as usize;
        train_idx.extend_from_slice(&idx[..n_train]);
        test_idx.extend_from_slice(&idx[n_train..]);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok((train_idx, test_idx))
}

pub fn holdout_eval(
    vectors: &[FeatureVector],
    spec: &AlgoSpec,
    train_fraction: f64,
    seed: u64,
) -> Result<HoldoutResult> {
    let (x, y) = design_matrix(vectors)?;
    let (train_idx, test_idx) = stratified_split(&y, train_fraction, seed)?;
    if test_idx.is_empty() {
        return Err(Error::DegenerateTrainingSet("holdout split leaves no test samples".into()));
    }
    if !both_classes(&y, train_idx.iter().copied()) {
        return Err(Error::DegenerateTrainingSet("holdout training part lacks a class".into()));
    }
    let scores = fit_and_score(&x, &y, spec, &train_idx, &test_idx, |_| {})?;
    let truth: Vec<Label> = test_idx.iter().map(|&i| y[i]).collect();
    let predicted: Vec<Label> = scores.iter().map(|&s| label_for_score(s)).collect();
    let confusion = ConfusionMatrix::from_predictions(&truth, &predicted);
    let roc = roc_curve(&truth, &scores).ok();
    let mut metrics = compute_metrics(&confusion)?;
    metrics.auc = roc.as_ref().map(|r| r.auc);
    Ok(HoldoutResult {
        spec: spec.clone(),
        train_fraction,
        seed,
        n_train: train_idx.len(),
        n_test: test_idx.len(),
        confusion,
        metrics,
        roc,
        test_indices: test_idx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::Family;

    #[test]
    fn fold_sizes() {
        let folds = kfold_split(10, 5, 56).unwrap();
        assert!(folds.iter().all(|f| f.len() == 2));
        let mut sizes: Vec<usize> = kfold_split(11, 5, 56).unwrap().iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 2, 2, 3]);
        assert_eq!(kfold_split(11, 5, 3).unwrap(), kfold_split(11, 5, 3).unwrap());
        assert!(kfold_split(4, 5, 56).is_err());
        assert!(kfold_split(4, 1, 56).is_err());
    }

    fn separable(n: usize) -> Vec<FeatureVector> {
        (0..n)
            .map(|i| {
                let task = i % 2 == 0;
                let off = if task { 5.0 } else { 0.0 };
                FeatureVector {
                    values: vec![off + (i as f64 * 0.61).sin(), off + (i as f64 * 0.37).cos()],
                    label: if task { Label::Task } else { Label::Rest },
                    subject_id: format!("S{}", i % 4),
                    trial_index: i,
                }
            })
            .collect()
    }

    #[test]
    fn separable_cv_is_perfect() {
        let r = cross_validate(&separable(50), &AlgoSpec::new(Family::Lda), 5, 56).unwrap();
        assert_eq!(r.pooled_metrics.accuracy, 1.0);
        assert_eq!(r.pooled_confusion.total(), 50);
        assert_eq!(r.folds.len(), 5);
    }

    #[test]
    fn too_few_samples_for_k() {
        assert!(cross_validate(&separable(4), &AlgoSpec::new(Family::Lda), 5, 56).is_err());
    }

    #[test]
    fn holdout_split_sizes() {
        let v = separable(100);
        let r = holdout_eval(&v, &AlgoSpec::new(Family::Lda), 0.8, 56).unwrap();
        assert_eq!((r.n_train, r.n_test), (80, 20));
        assert_eq!(r.metrics.accuracy, 1.0);
        assert!(holdout_eval(&v, &AlgoSpec::new(Family::Lda), 1.0, 56).is_err());
    }
}
