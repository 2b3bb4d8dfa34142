//! Gaussian naive Bayes.

use ndarray::{Array1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::{ModelParams, TrainingMetadata};
use crate::recording::Label;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GnbParams {
    pub var_floor: f64,
}

impl Default for GnbParams {
    fn default() -> Self {
        Self { var_floor: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GnbModel {
    pub mean_task: Vec<f64>,
    pub var_task: Vec<f64>,
    pub mean_rest: Vec<f64>,
    pub var_rest: Vec<f64>,
    pub prior_task: f64,
}

fn log_density(x: f64, mean: f64, var: f64) -> f64 {
    -0.5 * ((2.0 * std::f64::consts::PI * var).ln() + (x - mean) * (x - mean) / var)
}

impl GnbModel {
    /// Log posterior odds of task versus rest.
    pub fn scores(&self, x: ArrayView2<'_, f64>) -> Array1<f64> {
        let prior = (self.prior_task / (1.0 - self.prior_task)).ln();
        Array1::from_iter(x.rows().into_iter().map(|row| {
            let mut s = prior;
            for (j, &v) in row.iter().enumerate() {
                s += log_density(v, self.mean_task[j], self.var_task[j])
                    - log_density(v, self.mean_rest[j], self.var_rest[j]);
            }
            s
        }))
    }
}

fn moments(x: ArrayView2<'_, f64>, y: &[Label], class: Label, floor: f64) -> (Vec<f64>, Vec<f64>) {
    let rows: Vec<_> = x
        .rows()
        .into_iter()
        .zip(y)
        .filter(|(_, &l)| l == class)
        .map(|(r, _)| r)
        .collect();
    let n = rows.len() as f64;
    let d = x.ncols();
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let var = (0..d)
        .map(|j| {
            let v = rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n;
            v.max(floor)
        })
        .collect();
    (mean, var)
}

pub(crate) fn train(p: &GnbParams, x: ArrayView2<'_, f64>, y: &[Label]) -> (ModelParams, TrainingMetadata) {
    let (mean_task, var_task) = moments(x, y, Label::Task, p.var_floor);
    let (mean_rest, var_rest) = moments(x, y, Label::Rest, p.var_floor);
    let prior_task = y.iter().filter(|l| l.is_task()).count() as f64 / y.len() as f64;
    (
        ModelParams::Gnb(GnbModel {
            mean_task,
            var_task,
            mean_rest,
            var_rest,
            prior_task,
        }),
        TrainingMetadata::default(),
    )
}
