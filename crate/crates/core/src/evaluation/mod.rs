//! Validation protocols, metrics, significance testing and the
//! subject-dependent / subject-independent experiment drivers.

use serde::{Deserialize, Serialize};

use crate::classifiers::AlgoSpec;
use crate::error::{Error, Result};
use crate::features::{FeatureConfig, FeatureVector};
use crate::recording::{SegmentationConfig, SignalKind};

pub mod cv;
pub mod metrics;
pub mod ttest;

pub use cv::{
    cross_validate, cross_validate_with_hook, holdout_eval, kfold_split, stratified_split, CvResult,
    FoldFit, FoldResult, HoldoutResult,
};
pub use metrics::{compute_metrics, roc_curve, ConfusionMatrix, Metrics, RocCurve, RocPoint};
pub use ttest::{welch_t_test, SampleSummary, TTestResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentMode {
    /// Each subject evaluated on its own data.
    SubjectDependent,
    /// All subjects pooled and shuffled together.
    SubjectIndependent,
}

impl ExperimentMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentMode::SubjectDependent => "subject-dependent",
            ExperimentMode::SubjectIndependent => "subject-independent",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "kebab-case")]
pub enum Protocol {
    KFold { k: usize },
    Holdout { train_fraction: f64 },
}

impl Default for Protocol {
    fn default() -> Self {
        Protocol::KFold { k: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "kebab-case")]
pub enum Evaluation {
    KFold(CvResult),
    Holdout(HoldoutResult),
}

impl Evaluation {
    pub fn metrics(&self) -> &Metrics {
        match self {
            Evaluation::KFold(r) => &r.pooled_metrics,
            Evaluation::Holdout(r) => &r.metrics,
        }
    }

    pub fn confusion(&self) -> &ConfusionMatrix {
        match self {
            Evaluation::KFold(r) => &r.pooled_confusion,
            Evaluation::Holdout(r) => &r.confusion,
        }
    }

    pub fn roc(&self) -> Option<&RocCurve> {
        match self {
            Evaluation::KFold(r) => r.roc.as_ref(),
            Evaluation::Holdout(r) => r.roc.as_ref(),
        }
    }
}

pub fn evaluate(vectors: &[FeatureVector], spec: &AlgoSpec, protocol: Protocol, seed: u64) -> Result<Evaluation> {
    match protocol {
        Protocol::KFold { k } => cross_validate(vectors, spec, k, seed).map(Evaluation::KFold),
        Protocol::Holdout { train_fraction } => {
            holdout_eval(vectors, spec, train_fraction, seed).map(Evaluation::Holdout)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubjectOutcome {
    Evaluation(Box<Evaluation>),
    Error(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubjectEntry {
    pub subject_id: String,
    pub n_vectors: usize,
    pub outcome: SubjectOutcome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub mode: ExperimentMode,
    /// Subject-independent result.
    pub pooled: Option<Evaluation>,
    /// Subject-dependent rows, in order of first appearance.
    pub subjects: Vec<SubjectEntry>,
    /// Mean and sample SD of per-subject accuracy (subject-dependent only).
    pub subject_accuracy_mean: Option<f64>,
    pub subject_accuracy_sd: Option<f64>,
}

impl ExperimentResult {
    /// Headline accuracy: pooled, or the across-subject mean.
    pub fn accuracy(&self) -> Option<f64> {
        match self.mode {
            ExperimentMode::SubjectIndependent => self.pooled.as_ref().map(|e| e.metrics().accuracy),
            ExperimentMode::SubjectDependent => self.subject_accuracy_mean,
        }
    }
}

pub fn run_experiment(
    mode: ExperimentMode,
    vectors: &[FeatureVector],
    spec: &AlgoSpec,
    protocol: Protocol,
    seed: u64,
) -> Result<ExperimentResult> {
    if vectors.is_empty() {
        return Err(Error::Empty("no feature vectors"));
    }
    if let Some(i) = vectors.iter().position(|v| v.subject_id.is_empty()) {
        return Err(Error::MissingSubjectId(i));
    }
    match mode {
        ExperimentMode::SubjectIndependent => Ok(ExperimentResult {
            mode,
            pooled: Some(evaluate(vectors, spec, protocol, seed)?),
            subjects: Vec::new(),
            subject_accuracy_mean: None,
            subject_accuracy_sd: None,
        }),
        ExperimentMode::SubjectDependent => {
            let mut order: Vec<&str> = Vec::new();
            for v in vectors {
                if !order.contains(&v.subject_id.as_str()) {
                    order.push(&v.subject_id);
                }
            }
            let mut subjects = Vec::with_capacity(order.len());
            let mut accs = Vec::new();
            for id in order {
                let own: Vec<FeatureVector> =
                    vectors.iter().filter(|v| v.subject_id == id).cloned().collect();
                let outcome = match evaluate(&own, spec, protocol, seed) {
                    Ok(e) => {
                        accs.push(e.metrics().accuracy);
                        SubjectOutcome::Evaluation(Box::new(e))
                    }
                    Err(e) => {
                        log::warn!("subject {id}: {e}");
                        SubjectOutcome::Error(e.to_string())
                    }
                };
                subjects.push(SubjectEntry {
                    subject_id: id.to_string(),
                    n_vectors: own.len(),
                    outcome,
                });
            }
            let (mean, sd) = if accs.is_empty() {
                (None, None)
            } else {
                let (m, s) = cv::mean_sd(&accs);
                (Some(m), Some(s))
            };
            Ok(ExperimentResult {
                mode,
                pooled: None,
                subjects,
                subject_accuracy_mean: mean,
                subject_accuracy_sd: sd,
            })
        }
    }
}

/// Effective configuration echoed into every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub seed: u64,
    pub mode: ExperimentMode,
    pub protocol: Protocol,
    pub signal_kind: Option<SignalKind>,
    pub segmentation: SegmentationConfig,
    pub features: FeatureConfig,
    pub fft_dc_bin_excluded: bool,
    pub normalization: String,
    pub n_subjects: usize,
    pub n_vectors: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: EvalConfig,
    pub spec: AlgoSpec,
    pub result: ExperimentResult,
}
