//! Linear families: hinge-loss SVM, logistic regression, and per-sample SGD.
//!
//! All three produce a hyperplane w·x + b; the score is its signed value.

use ndarray::{Array1, ArrayView1, ArrayView2};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{indicator, sigmoid, signed, softplus, ModelParams, TrainingMetadata};
use crate::recording::Label;
use crate::seeded_rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn scores(&self, x: ArrayView2<'_, f64>) -> Array1<f64> {
        x.dot(&ArrayView1::from(&self.weights)) + self.intercept
    }

    /// Margin width 2/‖w‖₂.
    pub fn margin_width(&self) -> f64 {
        2.0 / self.weights.iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    fn score_row(&self, row: ArrayView1<'_, f64>) -> f64 {
        row.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>() + self.intercept
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub c: f64,
    pub max_epochs: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            max_epochs: 2000,
        }
    }
}

/// Mean hinge loss max(0, 1 − y·f(x)).
pub fn hinge_loss(model: &LinearModel, x: ArrayView2<'_, f64>, y: &[Label]) -> f64 {
    let n = y.len() as f64;
    x.rows()
        .into_iter()
        .zip(y)
        .map(|(row, &l)| (1.0 - signed(l) * model.score_row(row)).max(0.0))
        .sum::<f64>()
        / n
}

/// Primal subgradient descent on λ/2‖w‖² + mean hinge with λ = 1/(C·n) and
/// step 1/(λt). The intercept is carried as the weight of a constant input.
/// Stops early once an epoch ends with zero training hinge loss.
pub(crate) fn train_svm(
    p: &SvmParams,
    seed: u64,
    x: ArrayView2<'_, f64>,
    y: &[Label],
) -> (ModelParams, TrainingMetadata) {
    let (n, d) = x.dim();
    let lambda = 1.0 / (p.c * n as f64);
    let mut model = LinearModel {
        weights: vec![0.0; d],
        intercept: 0.0,
    };
    let mut rng = seeded_rng(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut t = 0u64;
    let mut epochs = 0;
    let mut loss = hinge_loss(&model, x, y);
    for _ in 0..p.max_epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let yi = signed(y[i]);
            let row = x.row(i);
            let violated = yi * model.score_row(row) < 1.0;
            let shrink = 1.0 - eta * lambda;
            model.weights.iter_mut().for_each(|w| *w *= shrink);
            model.intercept *= shrink;
            if violated {
                for (w, xv) in model.weights.iter_mut().zip(row.iter()) {
                    *w += eta * yi * xv;
                }
                model.intercept += eta * yi;
            }
        }
        epochs += 1;
        loss = hinge_loss(&model, x, y);
        if loss == 0.0 {
            break;
        }
    }
    (
        ModelParams::Linear(model),
        TrainingMetadata {
            iterations: epochs,
            final_loss: Some(loss),
        },
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LrParams {
    pub l2: f64,
    pub step: f64,
    pub max_iter: usize,
    pub grad_tol: f64,
}

impl Default for LrParams {
    fn default() -> Self {
        Self {
            l2: 1e-4,
            step: 0.1,
            max_iter: 1000,
            grad_tol: 1e-6,
        }
    }
}

fn logistic_loss(model: &LinearModel, l2: f64, x: ArrayView2<'_, f64>, y: &[Label]) -> f64 {
    let z = model.scores(x);
    let data: f64 = z
        .iter()
        .zip(y)
        .map(|(&z, &l)| softplus(z) - indicator(l) * z)
        .sum::<f64>()
        / y.len() as f64;
    data + 0.5 * l2 * model.weights.iter().map(|w| w * w).sum::<f64>()
}

/// Full-batch gradient descent on the L2-penalised logistic loss.
pub(crate) fn train_lr(
    p: &LrParams,
    x: ArrayView2<'_, f64>,
    y: &[Label],
) -> (ModelParams, TrainingMetadata) {
    let (n, d) = x.dim();
    let targets = Array1::from_iter(y.iter().map(|&l| indicator(l)));
    let mut model = LinearModel {
        weights: vec![0.0; d],
        intercept: 0.0,
    };
    let mut iterations = 0;
    for _ in 0..p.max_iter {
        let residual = model.scores(x).mapv(sigmoid) - &targets;
        let mut grad_w = x.t().dot(&residual) / n as f64;
        for (g, w) in grad_w.iter_mut().zip(&model.weights) {
            *g += p.l2 * w;
        }
        let grad_b = residual.sum() / n as f64;
        let gmax = grad_w.iter().fold(grad_b.abs(), |m, g| m.max(g.abs()));
        if gmax < p.grad_tol {
            break;
        }
        for (w, g) in model.weights.iter_mut().zip(grad_w.iter()) {
            *w -= p.step * g;
        }
        model.intercept -= p.step * grad_b;
        iterations += 1;
    }
    let loss = logistic_loss(&model, p.l2, x, y);
    (
        ModelParams::Linear(model),
        TrainingMetadata {
            iterations,
            final_loss: Some(loss),
        },
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SgdParams {
    pub l2: f64,
    pub epochs: usize,
}

impl Default for SgdParams {
    fn default() -> Self {
        Self {
            l2: 1e-4,
            epochs: 50,
        }
    }
}

/// Per-sample logistic-loss updates with step 1/(1 + λt), seeded shuffling.
pub(crate) fn train_sgd(
    p: &SgdParams,
    seed: u64,
    x: ArrayView2<'_, f64>,
    y: &[Label],
) -> (ModelParams, TrainingMetadata) {
    let (n, d) = x.dim();
    let mut model = LinearModel {
        weights: vec![0.0; d],
        intercept: 0.0,
    };
    let mut rng = seeded_rng(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut t = 0u64;
    for _ in 0..p.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let eta = 1.0 / (1.0 + p.l2 * t as f64);
            t += 1;
            let row = x.row(i);
            let g = sigmoid(model.score_row(row)) - indicator(y[i]);
            for (w, xv) in model.weights.iter_mut().zip(row.iter()) {
                *w -= eta * (g * xv + p.l2 * *w);
            }
            model.intercept -= eta * g;
        }
    }
    let loss = logistic_loss(&model, p.l2, x, y);
    (
        ModelParams::Linear(model),
        TrainingMetadata {
            iterations: p.epochs,
            final_loss: Some(loss),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{train, AlgoSpec, Family};
    use ndarray::{array, Array2};

    #[test]
    fn linear_score_and_prediction() {
        let m = LinearModel {
            weights: vec![1.0, 0.0],
            intercept: -0.5,
        };
        assert_eq!(m.scores(array![[1.0, 0.0]].view())[0], 0.5);
        let m = LinearModel {
            weights: vec![2.0],
            intercept: 0.0,
        };
        assert_eq!(m.scores(array![[3.0]].view())[0], 6.0);
        assert!((m.margin_width() - 1.0).abs() < 1e-15);
    }

    fn separable() -> (Array2<f64>, Vec<Label>) {
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..20 {
            let u = (i as f64 * 0.37).sin() * 0.2;
            let v = (i as f64 * 0.71).cos() * 0.2;
            rows.extend([-1.2 + 4.0 * u, -1.2 + 4.0 * v]);
            y.push(Label::Rest);
            rows.extend([1.2 + 4.0 * v, 1.2 + 4.0 * u]);
            y.push(Label::Task);
        }
        (Array2::from_shape_vec((40, 2), rows).unwrap(), y)
    }

    #[test]
    fn svm_separates_with_small_hinge_loss() {
        let (x, y) = separable();
        let m = train(&AlgoSpec::new(Family::Svm), x.view(), &y).unwrap();
        assert!(m.metadata.final_loss.unwrap() < 1e-3);
        assert_eq!(m.predict(x.view()).unwrap(), y);
    }

    #[test]
    fn lr_midpoint_scores_near_zero() {
        // point-symmetric classes about the origin
        let (x, y) = separable();
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (row, &l) in x.rows().into_iter().zip(&y) {
            if l == Label::Rest {
                rows.extend([row[0], row[1]]);
                labels.push(Label::Rest);
                rows.extend([-row[0], -row[1]]);
                labels.push(Label::Task);
            }
        }
        let x = Array2::from_shape_vec((labels.len(), 2), rows).unwrap();
        let m = train(&AlgoSpec::new(Family::Lr), x.view(), &labels).unwrap();
        let s = m.decision_scores(array![[0.0, 0.0]].view()).unwrap()[0];
        assert!(s.abs() < 1e-9, "{s}");
    }

    #[test]
    fn sgd_learns_separable_data() {
        let (x, y) = separable();
        let m = train(&AlgoSpec::new(Family::Sgd), x.view(), &y).unwrap();
        assert_eq!(m.predict(x.view()).unwrap(), y);
    }
}
