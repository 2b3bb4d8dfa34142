//! CART decision trees (Gini) and bagged random forests.

use ndarray::{Array1, ArrayView1, ArrayView2};
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ModelParams, TrainingMetadata};
use crate::recording::Label;
use crate::seeded_rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: 8,
            min_samples_split: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RfParams {
    pub n_trees: usize,
    pub tree: TreeParams,
}

impl Default for RfParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            tree: TreeParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        task_fraction: f64,
        n_samples: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Nodes in pre-order; index 0 is the root. `x[feature] <= threshold` goes left.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn task_fraction(&self, x: ArrayView1<'_, f64>) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { task_fraction, .. } => return task_fraction,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    /// Leaf task fraction − 0.5.
    pub fn scores(&self, x: ArrayView2<'_, f64>) -> Array1<f64> {
        Array1::from_iter(x.rows().into_iter().map(|r| self.task_fraction(r) - 0.5))
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

fn gini(tasks: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = tasks as f64 / total as f64;
    2.0 * p * (1.0 - p)
}

struct Builder<'a, R> {
    x: ArrayView2<'a, f64>,
    is_task: Vec<bool>,
    params: &'a TreeParams,
    /// Some(rng) samples this many features per split.
    feature_sampling: Option<(usize, &'a mut R)>,
    nodes: Vec<Node>,
}

impl<R: Rng> Builder<'_, R> {
    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.x.ncols();
        match &mut self.feature_sampling {
            None => (0..d).collect(),
            Some((m, rng)) => {
                let mut f = sample(*rng, d, *m).into_vec();
                f.sort_unstable();
                f
            }
        }
    }

    /// Best (feature, threshold) by weighted Gini; earlier feature, then lower
    /// threshold, wins ties.
    fn best_split(&mut self, idx: &[usize]) -> Option<(usize, f64)> {
        let total = idx.len();
        let total_tasks = idx.iter().filter(|&&i| self.is_task[i]).count();
        let mut best: Option<(f64, usize, f64)> = None;
        let mut sorted: Vec<(f64, bool)> = Vec::with_capacity(total);
        for feature in self.candidate_features() {
            sorted.clear();
            sorted.extend(idx.iter().map(|&i| (self.x[[i, feature]], self.is_task[i])));
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left_tasks = 0;
            for k in 0..total - 1 {
                if sorted[k].1 {
                    left_tasks += 1;
                }
                if sorted[k].0 == sorted[k + 1].0 {
                    continue;
                }
                let nl = k + 1;
                let nr = total - nl;
                let impurity = (nl as f64 * gini(left_tasks, nl)
                    + nr as f64 * gini(total_tasks - left_tasks, nr))
                    / total as f64;
                let threshold = 0.5 * (sorted[k].0 + sorted[k + 1].0);
                if best.map_or(true, |(b, _, _)| impurity < b) {
                    best = Some((impurity, feature, threshold));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }

    fn build(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let tasks = idx.iter().filter(|&&i| self.is_task[i]).count();
        let at = self.nodes.len();
        self.nodes.push(Node::Leaf {
            task_fraction: tasks as f64 / idx.len() as f64,
            n_samples: idx.len(),
        });
        let pure = tasks == 0 || tasks == idx.len();
        if pure || depth >= self.params.max_depth || idx.len() < self.params.min_samples_split {
            return at;
        }
        let Some((feature, threshold)) = self.best_split(&idx) else {
            return at;
        };
        let (l, r): (Vec<usize>, Vec<usize>) =
            idx.into_iter().partition(|&i| self.x[[i, feature]] <= threshold);
        let left = self.build(l, depth + 1);
        let right = self.build(r, depth + 1);
        self.nodes[at] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        at
    }
}

fn grow<R: Rng>(
    params: &TreeParams,
    x: ArrayView2<'_, f64>,
    y: &[Label],
    idx: Vec<usize>,
    feature_sampling: Option<(usize, &mut R)>,
) -> DecisionTree {
    let mut b = Builder {
        x,
        is_task: y.iter().map(|l| l.is_task()).collect(),
        params,
        feature_sampling,
        nodes: Vec::new(),
    };
    b.build(idx, 0);
    DecisionTree { nodes: b.nodes }
}

pub(crate) fn train_tree(p: &TreeParams, x: ArrayView2<'_, f64>, y: &[Label]) -> (ModelParams, TrainingMetadata) {
    let tree = grow::<rand_chacha::ChaCha8Rng>(p, x, y, (0..x.nrows()).collect(), None);
    let depth = tree.depth();
    (
        ModelParams::Tree(tree),
        TrainingMetadata {
            iterations: depth,
            final_loss: None,
        },
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<DecisionTree>,
}

impl ForestModel {
    /// Fraction of trees voting task − 0.5, so a tied vote predicts rest.
    pub fn scores(&self, x: ArrayView2<'_, f64>) -> Array1<f64> {
        let n = self.trees.len() as f64;
        Array1::from_iter(x.rows().into_iter().map(|r| {
            let votes = self.trees.iter().filter(|t| t.task_fraction(r) > 0.5).count();
            votes as f64 / n - 0.5
        }))
    }
}

/// Tree i is grown from its own generator seeded with `seed + i`: a bootstrap
/// sample of the rows, then ⌊√d⌋ features (at least 1) drawn per split.
pub(crate) fn train_forest(
    p: &RfParams,
    seed: u64,
    x: ArrayView2<'_, f64>,
    y: &[Label],
) -> (ModelParams, TrainingMetadata) {
    let (n, d) = x.dim();
    let m = ((d as f64).sqrt().floor() as usize).clamp(1, d);
    let trees = (0..p.n_trees.max(1))
        .into_par_iter()
        .map(|t| {
            let mut rng = seeded_rng(seed.wrapping_add(t as u64));
            let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            grow(&p.tree, x, y, idx, Some((m, &mut rng)))
        })
        .collect();
    (
        ModelParams::Forest(ForestModel { trees }),
        TrainingMetadata {
            iterations: p.n_trees,
            final_loss: None,
        },
    )
}
