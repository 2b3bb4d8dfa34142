//! Fully-connected ReLU network with a sigmoid output, trained full-batch
//! with Adam on binary cross-entropy.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{indicator, sigmoid, softplus, ModelParams, TrainingMetadata};
use crate::error::{Error, Result};
use crate::recording::Label;
use crate::seeded_rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub max_iter: usize,
}

impl Default for MlpParams {
    fn default() -> Self {
        Self {
            hidden: vec![10, 10, 10, 10],
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            max_iter: 3000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// out × in
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub layers: Vec<Layer>,
}

impl MlpModel {
    /// He-normal weights, zero biases. `sizes` runs input → output.
    pub fn initialise(sizes: &[usize], seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let layers = sizes
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let normal = Normal::new(0.0, (2.0 / fan_in as f64).sqrt()).expect("finite sd");
                Layer {
                    weights: Array2::from_shape_simple_fn((fan_out, fan_in), || normal.sample(&mut rng)),
                    bias: Array1::zeros(fan_out),
                }
            })
            .collect();
        Self { layers }
    }

    /// Pre-activations of every layer; the last one holds the output logits.
    fn forward(&self, x: ArrayView2<'_, f64>) -> (Vec<Array2<f64>>, Vec<Array2<f64>>) {
        let mut activations = vec![x.to_owned()];
        let mut pre = Vec::with_capacity(self.layers.len());
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let z = activations[l].dot(&layer.weights.t()) + &layer.bias;
            let a = if l == last { z.clone() } else { z.mapv(|v| v.max(0.0)) };
            pre.push(z);
            activations.push(a);
        }
        (activations, pre)
    }

    /// Output logit: log-odds of task.
    pub fn scores(&self, x: ArrayView2<'_, f64>) -> Array1<f64> {
        let (acts, _) = self.forward(x);
        acts.last().expect("at least one layer").column(0).to_owned()
    }

    /// Mean binary cross-entropy.
    pub fn loss(&self, x: ArrayView2<'_, f64>, y: &[Label]) -> f64 {
        let z = self.scores(x);
        z.iter()
            .zip(y)
            .map(|(&z, &l)| softplus(z) - indicator(l) * z)
            .sum::<f64>()
            / y.len() as f64
    }

    /// Loss and its gradient by backpropagation, one [`Layer`] of partials per layer.
    pub fn loss_and_gradient(&self, x: ArrayView2<'_, f64>, y: &[Label]) -> (f64, Vec<Layer>) {
        let n = y.len() as f64;
        let (acts, pre) = self.forward(x);
        let logits = acts.last().expect("output layer").column(0);
        let loss = logits
            .iter()
            .zip(y)
            .map(|(&z, &l)| softplus(z) - indicator(l) * z)
            .sum::<f64>()
            / n;
        let mut delta = Array2::from_shape_fn((y.len(), 1), |(i, _)| (sigmoid(logits[i]) - indicator(y[i])) / n);

        let mut grads = Vec::with_capacity(self.layers.len());
        for l in (0..self.layers.len()).rev() {
            let gw = delta.t().dot(&acts[l]);
            let gb = delta.sum_axis(Axis(0));
            grads.push(Layer { weights: gw, bias: gb });
            if l > 0 {
                let mut back = delta.dot(&self.layers[l].weights);
                back.zip_mut_with(&pre[l - 1], |d, &z| {
                    if z <= 0.0 {
                        *d = 0.0
                    }
                });
                delta = back;
            }
        }
        grads.reverse();
        (loss, grads)
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    /// Weights then bias per layer, row-major.
    pub fn flat_params(&self) -> Vec<f64> {
        flatten(&self.layers)
    }

    pub fn set_flat_params(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.n_params());
        let mut it = flat.iter().copied();
        for layer in &mut self.layers {
            layer.weights.iter_mut().for_each(|w| *w = it.next().unwrap());
            layer.bias.iter_mut().for_each(|b| *b = it.next().unwrap());
        }
    }
}

/// Flattens layers in the same order as [`MlpModel::flat_params`].
pub fn flatten(layers: &[Layer]) -> Vec<f64> {
    layers
        .iter()
        .flat_map(|l| l.weights.iter().chain(l.bias.iter()).copied())
        .collect()
}

pub(crate) fn train(
    p: &MlpParams,
    seed: u64,
    x: ArrayView2<'_, f64>,
    y: &[Label],
) -> Result<(ModelParams, TrainingMetadata)> {
    if p.hidden.contains(&0) {
        return Err(Error::invalid("hidden layer sizes must be positive"));
    }
    let mut sizes = vec![x.ncols()];
    sizes.extend(&p.hidden);
    sizes.push(1);
    let mut model = MlpModel::initialise(&sizes, seed);
    let mut flat = model.flat_params();
    let mut m = vec![0.0; flat.len()];
    let mut v = vec![0.0; flat.len()];
    let mut loss = f64::NAN;
    for t in 1..=p.max_iter {
        let (l, grads) = model.loss_and_gradient(x, y);
        loss = l;
        let g = flatten(&grads);
        let bc1 = 1.0 - p.beta1.powi(t as i32);
        let bc2 = 1.0 - p.beta2.powi(t as i32);
        for i in 0..flat.len() {
            m[i] = p.beta1 * m[i] + (1.0 - p.beta1) * g[i];
            v[i] = p.beta2 * v[i] + (1.0 - p.beta2) * g[i] * g[i];
            let m_hat = m[i] / bc1;
            let v_hat = v[i] / bc2;
            flat[i] -= p.learning_rate * m_hat / (v_hat.sqrt() + p.epsilon);
        }
        model.set_flat_params(&flat);
    }
    if !loss.is_finite() || flat.iter().any(|w| !w.is_finite()) {
        return Err(Error::Numerical("MLP training diverged".into()));
    }
    let final_loss = model.loss(x, y);
    Ok((
        ModelParams::Mlp(model),
        TrainingMetadata {
            iterations: p.max_iter,
            final_loss: Some(final_loss),
        },
    ))
}
