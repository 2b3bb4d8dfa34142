//! Two-class LDA with a ridge-stabilised pooled covariance.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::{ModelParams, TrainingMetadata};
use crate::error::Result;
use crate::linalg::cholesky_solve;
use crate::recording::Label;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LdaParams {
    /// Ridge added to the pooled covariance, relative to trace(Σ)/d.
    pub ridge_factor: f64,
}

impl Default for LdaParams {
    fn default() -> Self {
        Self { ridge_factor: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub mean_task: Vec<f64>,
    pub mean_rest: Vec<f64>,
    pub prior_task: f64,
    pub ridge: f64,
}

impl LdaModel {
    /// δ_task(x) − δ_rest(x) = w·x − w·(μ_task + μ_rest)/2 + ln(π_task/π_rest).
    pub fn scores(&self, x: ArrayView2<'_, f64>) -> Array1<f64> {
        x.dot(&ArrayView1::from(&self.weights)) + self.intercept
    }
}

/// Class means and the pooled within-class covariance (divisor n − 2,
/// floored at 1), before the ridge is added.
pub fn pooled_covariance(
    x: ArrayView2<'_, f64>,
    y: &[Label],
) -> (Array1<f64>, Array1<f64>, Array2<f64>) {
    let d = x.ncols();
    let mut mean_task = Array1::zeros(d);
    let mut mean_rest = Array1::zeros(d);
    let (mut n_task, mut n_rest) = (0usize, 0usize);
    for (row, l) in x.rows().into_iter().zip(y) {
        if l.is_task() {
            mean_task += &row;
            n_task += 1;
        } else {
            mean_rest += &row;
            n_rest += 1;
        }
    }
    mean_task /= n_task as f64;
    mean_rest /= n_rest as f64;

    let mut centred = x.to_owned();
    for (mut row, l) in centred.rows_mut().into_iter().zip(y) {
        row -= if l.is_task() { &mean_task } else { &mean_rest };
    }
    let denom = (y.len().saturating_sub(2)).max(1) as f64;
    let cov = centred.t().dot(&centred) / denom;
    (mean_task, mean_rest, cov)
}

pub(crate) fn train(
    p: &LdaParams,
    x: ArrayView2<'_, f64>,
    y: &[Label],
) -> Result<(ModelParams, TrainingMetadata)> {
    let d = x.ncols();
    let (mean_task, mean_rest, mut cov) = pooled_covariance(x, y);
    let trace = cov.diag().sum();
    let ridge = if trace > 0.0 {
        p.ridge_factor * trace / d as f64
    } else {
        p.ridge_factor
    };
    for i in 0..d {
        cov[[i, i]] += ridge;
    }
    let diff = &mean_task - &mean_rest;
    let w = cholesky_solve(&cov, &diff)?;
    let n_task = y.iter().filter(|l| l.is_task()).count() as f64;
    let prior_task = n_task / y.len() as f64;
    let midpoint = (&mean_task + &mean_rest) / 2.0;
    let intercept = -w.dot(&midpoint) + (prior_task / (1.0 - prior_task)).ln();
    Ok((
        ModelParams::Lda(LdaModel {
            weights: w.to_vec(),
            intercept,
            mean_task: mean_task.to_vec(),
            mean_rest: mean_rest.to_vec(),
            prior_task,
            ridge,
        }),
        TrainingMetadata::default(),
    ))
}
