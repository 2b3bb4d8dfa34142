//! The nine classifier families behind one train / predict / score surface.
//!
//! Every family produces a real-valued decision score where larger means more
//! task-like, and `predict` returns `Task` exactly when the score is strictly
//! positive. Training is a pure function of (spec, X, y): all randomness comes
//! from ChaCha generators seeded by `spec.seed` plus a fixed component index.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recording::Label;

pub mod gnb;
pub mod knn;
pub mod lda;
pub mod linear;
pub mod mlp;
pub mod tree;

pub use gnb::{GnbModel, GnbParams};
pub use knn::{KnnModel, KnnParams};
pub use lda::{LdaModel, LdaParams};
pub use linear::{LinearModel, LrParams, SgdParams, SvmParams};
pub use mlp::{MlpModel, MlpParams};
pub use tree::{DecisionTree, ForestModel, RfParams, TreeParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Svm,
    Lr,
    Dt,
    Rf,
    Kn,
    Gnb,
    Lda,
    Mlp,
    Sgd,
}

impl Family {
    /// Table order used in reports.
    pub const ALL: [Family; 9] = [
        Family::Svm,
        Family::Lr,
        Family::Dt,
        Family::Rf,
        Family::Kn,
        Family::Gnb,
        Family::Lda,
        Family::Mlp,
        Family::Sgd,
    ];

    pub fn abbreviation(self) -> &'static str {
        match self {
            Family::Svm => "svm",
            Family::Lr => "lr",
            Family::Dt => "dt",
            Family::Rf => "rf",
            Family::Kn => "kn",
            Family::Gnb => "gnb",
            Family::Lda => "lda",
            Family::Mlp => "mlp",
            Family::Sgd => "sgd",
        }
    }

    pub fn full_name(self) -> &'static str {
        match self {
            Family::Svm => "Support Vector Machine",
            Family::Lr => "Logistic Regression",
            Family::Dt => "Decision Tree",
            Family::Rf => "Random Forest",
            Family::Kn => "K-Nearest Neighbors",
            Family::Gnb => "Gaussian Naive Bayes",
            Family::Lda => "Linear Discriminant Analysis",
            Family::Mlp => "Multi-layer Perceptron",
            Family::Sgd => "Stochastic Gradient Descent",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.abbreviation())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Family::ALL
            .into_iter()
            .find(|f| f.abbreviation() == lower)
            .ok_or_else(|| Error::invalid(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Hyperparameters {
    Svm(SvmParams),
    Lr(LrParams),
    Dt(TreeParams),
    Rf(RfParams),
    Kn(KnnParams),
    Gnb(GnbParams),
    Lda(LdaParams),
    Mlp(MlpParams),
    Sgd(SgdParams),
}

impl Hyperparameters {
    pub fn defaults(family: Family) -> Self {
        match family {
            Family::Svm => Hyperparameters::Svm(SvmParams::default()),
            Family::Lr => Hyperparameters::Lr(LrParams::default()),
            Family::Dt => Hyperparameters::Dt(TreeParams::default()),
            Family::Rf => Hyperparameters::Rf(RfParams::default()),
            Family::Kn => Hyperparameters::Kn(KnnParams::default()),
            Family::Gnb => Hyperparameters::Gnb(GnbParams::default()),
            Family::Lda => Hyperparameters::Lda(LdaParams::default()),
            Family::Mlp => Hyperparameters::Mlp(MlpParams::default()),
            Family::Sgd => Hyperparameters::Sgd(SgdParams::default()),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            Hyperparameters::Svm(_) => Family::Svm,
            Hyperparameters::Lr(_) => Family::Lr,
            Hyperparameters::Dt(_) => Family::Dt,
            Hyperparameters::Rf(_) => Family::Rf,
            Hyperparameters::Kn(_) => Family::Kn,
            Hyperparameters::Gnb(_) => Family::Gnb,
            Hyperparameters::Lda(_) => Family::Lda,
            Hyperparameters::Mlp(_) => Family::Mlp,
            Hyperparameters::Sgd(_) => Family::Sgd,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgoSpec {
    pub hyperparameters: Hyperparameters,
    pub seed: u64,
}

impl AlgoSpec {
    /// Family defaults with seed 56.
    pub fn new(family: Family) -> Self {
        Self {
            hyperparameters: Hyperparameters::defaults(family),
            seed: crate::DEFAULT_SEED,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn family(&self) -> Family {
        self.hyperparameters.family()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    Linear(LinearModel),
    Lda(LdaModel),
    Gnb(GnbModel),
    Knn(KnnModel),
    Tree(DecisionTree),
    Forest(ForestModel),
    Mlp(MlpModel),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub iterations: usize,
    pub final_loss: Option<f64>,
}

/// Immutable result of [`train`]; serializes to the debugging model dump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub spec: AlgoSpec,
    pub n_features: usize,
    pub params: ModelParams,
    pub metadata: TrainingMetadata,
}

pub(crate) fn validate_training(x: ArrayView2<'_, f64>, y: &[Label]) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            found: y.len(),
        });
    }
    if x.nrows() < 2 {
        return Err(Error::DegenerateTrainingSet(format!(
            "{} sample(s); need at least 2",
            x.nrows()
        )));
    }
    if x.ncols() == 0 {
        return Err(Error::Empty("training set has no features"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let tasks = y.iter().filter(|l| l.is_task()).count();
    if tasks == 0 || tasks == y.len() {
        return Err(Error::DegenerateTrainingSet("only one class present".into()));
    }
    Ok(())
}

pub fn train(spec: &AlgoSpec, x: ArrayView2<'_, f64>, y: &[Label]) -> Result<TrainedModel> {
    validate_training(x, y)?;
    let seed = spec.seed;
    let (params, metadata) = match &spec.hyperparameters {
        Hyperparameters::Svm(p) => linear::train_svm(p, seed, x, y),
        Hyperparameters::Lr(p) => linear::train_lr(p, x, y),
        Hyperparameters::Sgd(p) => linear::train_sgd(p, seed, x, y),
        Hyperparameters::Lda(p) => lda::train(p, x, y)?,
        Hyperparameters::Gnb(p) => gnb::train(p, x, y),
        Hyperparameters::Kn(p) => knn::train(p, x, y),
        Hyperparameters::Dt(p) => tree::train_tree(p, x, y),
        Hyperparameters::Rf(p) => tree::train_forest(p, seed, x, y),
        Hyperparameters::Mlp(p) => mlp::train(p, seed, x, y)?,
    };
    Ok(TrainedModel {
        spec: spec.clone(),
        n_features: x.ncols(),
        params,
        metadata,
    })
}

impl TrainedModel {
    pub fn family(&self) -> Family {
        self.spec.family()
    }

    fn check_dim(&self, x: ArrayView2<'_, f64>) -> Result<()> {
        if x.ncols() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                found: x.ncols(),
            });
        }
        Ok(())
    }

    /// Larger is more task-like.
    pub fn decision_scores(&self, x: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        self.check_dim(x)?;
        Ok(match &self.params {
            ModelParams::Linear(m) => m.scores(x),
            ModelParams::Lda(m) => m.scores(x),
            ModelParams::Gnb(m) => m.scores(x),
            ModelParams::Knn(m) => m.scores(x),
            ModelParams::Tree(m) => m.scores(x),
            ModelParams::Forest(m) => m.scores(x),
            ModelParams::Mlp(m) => m.scores(x),
        })
    }

    /// `Task` iff the decision score is > 0.
    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Vec<Label>> {
        Ok(self.decision_scores(x)?.iter().map(|&s| label_for_score(s)).collect())
    }
}

pub fn label_for_score(score: f64) -> Label {
    if score > 0.0 {
        Label::Task
    } else {
        Label::Rest
    }
}

/// +1 for task, −1 for rest.
pub(crate) fn signed(label: Label) -> f64 {
    if label.is_task() {
        1.0
    } else {
        -1.0
    }
}

/// 1 for task, 0 for rest.
pub(crate) fn indicator(label: Label) -> f64 {
    if label.is_task() {
        1.0
    } else {
        0.0
    }
}

/// ln(1 + e^z) without overflow.
pub(crate) fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.abbreviation().parse::<Family>().unwrap(), f);
        }
        let err = "xgb".parse::<Family>().unwrap_err();
        assert!(err.to_string().contains("unknown algorithm"));
    }

    #[test]
    fn single_class_rejected_for_every_family() {
        let x = array![[0.0, 1.0], [1.0, 0.0], [0.5, 0.5]];
        let y = [Label::Task; 3];
        for f in Family::ALL {
            let err = train(&AlgoSpec::new(f), x.view(), &y).unwrap_err();
            assert!(err.to_string().contains("degenerate training set"), "{f}");
        }
    }

    #[test]
    fn non_finite_rejected() {
        let x = array![[0.0], [f64::NAN]];
        let y = [Label::Task, Label::Rest];
        assert!(matches!(
            train(&AlgoSpec::new(Family::Lda), x.view(), &y),
            Err(Error::NonFiniteInput)
        ));
    }

    #[test]
    fn dimension_mismatch_on_predict() {
        let x = array![[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]];
        let y = [Label::Rest, Label::Task, Label::Rest, Label::Task];
        let m = train(&AlgoSpec::new(Family::Lda), x.view(), &y).unwrap();
        assert!(m.predict(array![[1.0]].view()).is_err());
    }

    #[test]
    fn stable_sigmoid_and_softplus() {
        assert!((sigmoid(0.0) - 0.5).abs() < 1e-15);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(800.0) <= 1.0);
        assert!((softplus(1000.0) - 1000.0).abs() < 1e-9);
        assert!(softplus(-1000.0) >= 0.0);
    }
}
