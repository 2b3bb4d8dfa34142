//! fNIRS binary-classification toolkit.
//!
//! The pipeline runs recording bundles through trial segmentation, per-channel
//! 4×4 feature matrices, train-fitted min-max normalization and one of nine
//! classifier families, then scores the result with k-fold or holdout
//! protocols. The [`channel_selection`] module ranks single channels and
//! weakly-correlated channel pairs on top of that pipeline, and [`synth`]
//! produces seeded recordings with planted ground truth so everything can be
//! checked without the original dataset.

pub mod channel_selection;
pub mod classifiers;
pub mod error;
pub mod evaluation;
pub mod features;
mod linalg;
pub mod recording;
pub mod synth;

pub use channel_selection::{
    AdjacencyKind, AdjacencyMatrix, ChannelRanking, ChannelSelection, CorrelationBand,
    PairCandidate,
};
pub use classifiers::{AlgoSpec, Family, TrainedModel};
pub use error::{Error, Result};
pub use evaluation::{
    ConfusionMatrix, CvResult, EvalReport, ExperimentMode, Metrics, Protocol, RocCurve,
    SampleSummary, TTestResult,
};
pub use features::{FeatureConfig, FeatureMatrix, FeatureVector, MinMaxParams};
pub use recording::{
    EventMarker, Label, LabeledSegment, RawRecording, SegmentationConfig, SignalKind,
};
pub use synth::{GroundTruth, SynthConfig};

/// Seed used throughout when none is given.
pub const DEFAULT_SEED: u64 = 56;

pub(crate) fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
