//! k-nearest neighbours over the stored training set.

use ndarray::{Array1, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::{ModelParams, TrainingMetadata};
use crate::recording::Label;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        Self { k: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub train_x: Array2<f64>,
    pub train_y: Vec<Label>,
}

impl KnnModel {
    /// Task fraction among the k nearest (Euclidean; ties to the lower
    /// training index) minus 0.5. A split vote scores 0 and so predicts rest.
    pub fn scores(&self, x: ArrayView2<'_, f64>) -> Array1<f64> {
        let k = self.k.min(self.train_y.len());
        Array1::from_iter(x.rows().into_iter().map(|q| {
            let mut dist: Vec<(f64, usize)> = self
                .train_x
                .rows()
                .into_iter()
                .enumerate()
                .map(|(i, r)| (r.iter().zip(q.iter()).map(|(a, b)| (a - b) * (a - b)).sum(), i))
                .collect();
            dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let tasks = dist[..k].iter().filter(|(_, i)| self.train_y[*i].is_task()).count();
            tasks as f64 / k as f64 - 0.5
        }))
    }
}

pub(crate) fn train(p: &KnnParams, x: ArrayView2<'_, f64>, y: &[Label]) -> (ModelParams, TrainingMetadata) {
    (
        ModelParams::Knn(KnnModel {
            k: p.k.max(1),
            train_x: x.to_owned(),
            train_y: y.to_vec(),
        }),
        TrainingMetadata::default(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{train, AlgoSpec, Family, Hyperparameters};
    use ndarray::array;

    #[test]
    fn one_nn_returns_own_label() {
        let x = array![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [3.0, 3.0]];
        let y = [Label::Task, Label::Rest, Label::Rest, Label::Task];
        let spec = AlgoSpec {
            hyperparameters: Hyperparameters::Kn(KnnParams { k: 1 }),
            seed: 56,
        };
        let m = train(&spec, x.view(), &y).unwrap();
        assert_eq!(m.predict(x.view()).unwrap(), y);
    }

    #[test]
    fn five_task_neighbours_score_half() {
        let x = Array2::from_shape_fn((8, 1), |(i, _)| i as f64);
        let y: Vec<Label> = (0..8).map(|i| if i < 5 { Label::Task } else { Label::Rest }).collect();
        let m = train(&AlgoSpec::new(Family::Kn), x.view(), &y).unwrap();
        assert_eq!(m.decision_scores(array![[0.0]].view()).unwrap()[0], 0.5);
    }
}
