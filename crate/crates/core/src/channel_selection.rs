//! Pearson / mutual-information channel adjacency and two-channel selection.
//!
//! Selection runs in four steps:
//!
//! 1. build the |Pearson| adjacency over the full recording and keep every
//!    pair strictly below the threshold (0.4 by default);
//! 2. cross-validate each channel on its own 16 features and keep the top
//!    ⌊fraction · N⌋ channels (20 % by default);
//! 3. keep the weak pairs that contain at least one top channel;
//! 4. cross-validate each kept pair on its 32 concatenated features and rank
//!    by accuracy, best first.

use std::fmt;

use ndarray::{Array2, ArrayView1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::AlgoSpec;
use crate::error::{Error, Result};
use crate::evaluation::cross_validate;
use crate::features::{channel_blocks, FeatureConfig, FeatureVector, FEATURES_PER_CHANNEL};
use crate::recording::{LabeledSegment, RawRecording};

pub const DEFAULT_THRESHOLD: f64 = 0.4;
pub const DEFAULT_TOP_FRACTION: f64 = 0.2;
pub const DEFAULT_MI_BINS: usize = 16;

/// Pearson product-moment correlation, clamped to [−1, 1].
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::invalid("correlation needs at least 2 samples"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn bin_indices(x: &[f64], bins: usize) -> Vec<usize> {
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = hi - lo;
    x.iter()
        .map(|&v| {
            if width == 0.0 {
                0
            } else {
                (((v - lo) / width * bins as f64) as usize).min(bins - 1)
            }
        })
        .collect()
}

/// Equal-width histogram estimate of mutual information in nats.
pub fn mutual_information(x: &[f64], y: &[f64], bins: usize) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if bins < 2 {
        return Err(Error::invalid(format!("need at least 2 bins, got {bins}")));
    }
    if x.is_empty() {
        return Err(Error::Empty("mutual information of empty series"));
    }
    let bx = bin_indices(x, bins);
    let by = bin_indices(y, bins);
    let mut joint = vec![0usize; bins * bins];
    let mut px = vec![0usize; bins];
    let mut py = vec![0usize; bins];
    for (&i, &j) in bx.iter().zip(&by) {
        joint[i * bins + j] += 1;
        px[i] += 1;
        py[j] += 1;
    }
    let n = x.len() as f64;
    // terms summed in sorted order so that swapping x and y is bit-exact
    let mut terms = Vec::new();
    for i in 0..bins {
        for j in 0..bins {
            let c = joint[i * bins + j];
            if c == 0 {
                continue;
            }
            let pij = c as f64 / n;
            terms.push(pij * (c as f64 * n / (px[i] as f64 * py[j] as f64)).ln());
        }
    }
    terms.sort_by(f64::total_cmp);
    Ok(terms.iter().sum::<f64>().max(0.0))
}

/// Plug-in entropy (nats) of the same equal-width histogram.
pub fn histogram_entropy(x: &[f64], bins: usize) -> f64 {
    let mut counts = vec![0usize; bins];
    for b in bin_indices(x, bins) {
        counts[b] += 1;
    }
    let n = x.len() as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdjacencyKind {
    AbsPearson,
    MutualInformation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdjacencyMatrix {
    pub kind: AdjacencyKind,
    pub values: Array2<f64>,
    pub channel_names: Option<Vec<String>>,
    /// Zero-variance channels; their rows and columns are all 0.
    pub degenerate: Vec<usize>,
}

impl AdjacencyMatrix {
    pub fn n_channels(&self) -> usize {
        self.values.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }
}

fn is_constant(x: ArrayView1<'_, f64>) -> bool {
    x.iter().all(|&v| v == x[0])
}

/// Channel-by-channel |Pearson| or MI over the whole recording.
pub fn adjacency(rec: &RawRecording, kind: AdjacencyKind, bins: Option<usize>) -> Result<AdjacencyMatrix> {
    let n = rec.n_channels();
    if n < 2 {
        return Err(Error::invalid("adjacency needs at least 2 channels"));
    }
    let bins = bins.unwrap_or(DEFAULT_MI_BINS);
    let columns: Vec<Vec<f64>> = (0..n).map(|c| rec.channel(c).to_vec()).collect();
    let degenerate: Vec<usize> = (0..n).filter(|&c| is_constant(rec.channel(c))).collect();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let entries: Vec<((usize, usize), f64)> = pairs
        .into_par_iter()
        .map(|(i, j)| {
            let v = if degenerate.contains(&i) || degenerate.contains(&j) {
                Ok(0.0)
            } else {
                match kind {
                    AdjacencyKind::AbsPearson if i == j => Ok(1.0),
                    AdjacencyKind::AbsPearson => pearson(&columns[i], &columns[j]).map(f64::abs),
                    AdjacencyKind::MutualInformation => {
                        mutual_information(&columns[i], &columns[j], bins)
                    }
                }
            };
            v.map(|v| ((i, j), v))
        })
        .collect::<Result<_>>()?;
    let mut values = Array2::zeros((n, n));
    for ((i, j), v) in entries {
        values[[i, j]] = v;
        values[[j, i]] = v;
    }
    Ok(AdjacencyMatrix {
        kind,
        values,
        channel_names: rec.channel_names().map(<[String]>::to_vec),
        degenerate,
    })
}

/// Interpretation bands for |r|, lower bound inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationBand {
    VeryWeak,
    Weak,
    Moderate,
    Strong,
    ExtremelyStrong,
}

impl CorrelationBand {
    pub fn label(self) -> &'static str {
        match self {
            CorrelationBand::VeryWeak => "Very Weak or No Correlation",
            CorrelationBand::Weak => "Weak Correlation",
            CorrelationBand::Moderate => "Moderate Correlation",
            CorrelationBand::Strong => "Strong Correlation",
            CorrelationBand::ExtremelyStrong => "Extremely Strong Correlation",
        }
    }
}

impl fmt::Display for CorrelationBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn interpret_correlation(abs_r: f64) -> Result<CorrelationBand> {
    if !(0.0..=1.0).contains(&abs_r) {
        return Err(Error::invalid(format!("|r| must lie in [0, 1], got {abs_r}")));
    }
    Ok(match abs_r {
        r if r < 0.2 => CorrelationBand::VeryWeak,
        r if r < 0.4 => CorrelationBand::Weak,
        r if r < 0.6 => CorrelationBand::Moderate,
        r if r < 0.8 => CorrelationBand::Strong,
        _ => CorrelationBand::ExtremelyStrong,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCandidate {
    /// (i, j) with i < j, zero-based.
    pub channels: (usize, usize),
    /// |Pearson r| between the two channels.
    pub pearson_r: f64,
    pub combo_accuracy: Option<f64>,
}

/// Pairs with |r| strictly below `threshold`, ascending by |r| then (i, j).
/// Degenerate channels never appear.
pub fn weak_pairs(adj: &AdjacencyMatrix, threshold: f64) -> Result<Vec<PairCandidate>> {
    if adj.kind != AdjacencyKind::AbsPearson {
        return Err(Error::invalid("weak_pairs needs an abs_pearson adjacency"));
    }
    let n = adj.n_channels();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if adj.degenerate.contains(&i) || adj.degenerate.contains(&j) {
                continue;
            }
            let r = adj.get(i, j);
            if r < threshold {
                out.push(PairCandidate {
                    channels: (i, j),
                    pearson_r: r,
                    combo_accuracy: None,
                });
            }
        }
    }
    out.sort_by(|a, b| a.pearson_r.total_cmp(&b.pearson_r).then(a.channels.cmp(&b.channels)));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelRanking {
    /// Pooled CV accuracy per channel, by channel index.
    pub accuracies: Vec<f64>,
    /// Best channels, accuracy descending, lower index first on ties.
    pub top_indices: Vec<usize>,
    pub top_fraction: f64,
}

/// ⌊fraction · n⌋, but at least one channel.
pub fn top_count(n: usize, top_fraction: f64) -> usize {
    ((top_fraction * n as f64 + 1e-9).floor() as usize).clamp(1, n.max(1))
}

/// Per-segment, per-channel 16-value feature blocks: `[segment][channel]`.
pub fn feature_blocks(
    segments: &[LabeledSegment],
    cfg: &FeatureConfig,
) -> Result<Vec<Vec<[f64; FEATURES_PER_CHANNEL]>>> {
    let first = segments.first().ok_or(Error::Empty("no segments"))?;
    let k = first.n_channels();
    if let Some(bad) = segments.iter().find(|s| s.n_channels() != k) {
        return Err(Error::ChannelCountMismatch {
            expected: k,
            found: bad.n_channels(),
        });
    }
    segments.par_iter().map(|s| channel_blocks(s, cfg)).collect()
}

/// Feature vectors built from the given channels' blocks, in the given order.
fn vectors_for(
    segments: &[LabeledSegment],
    blocks: &[Vec<[f64; FEATURES_PER_CHANNEL]>],
    channels: &[usize],
) -> Vec<FeatureVector> {
    segments
        .iter()
        .zip(blocks)
        .map(|(seg, b)| FeatureVector {
            values: channels.iter().flat_map(|&c| b[c]).collect(),
            label: seg.label,
            subject_id: seg.subject_id.clone(),
            trial_index: seg.trial_index,
        })
        .collect()
}

fn rank_from_blocks(
    segments: &[LabeledSegment],
    blocks: &[Vec<[f64; FEATURES_PER_CHANNEL]>],
    spec: &AlgoSpec,
    k: usize,
    seed: u64,
    top_fraction: f64,
) -> Result<ChannelRanking> {
    let n = blocks[0].len();
    let accuracies = (0..n)
        .into_par_iter()
        .map(|c| {
            let v = vectors_for(segments, blocks, &[c]);
            cross_validate(&v, spec, k, seed).map(|r| r.pooled_metrics.accuracy)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| accuracies[b].total_cmp(&accuracies[a]).then(a.cmp(&b)));
    order.truncate(top_count(n, top_fraction));
    Ok(ChannelRanking {
        accuracies,
        top_indices: order,
        top_fraction,
    })
}

pub fn rank_channels(
    segments: &[LabeledSegment],
    spec: &AlgoSpec,
    k: usize,
    seed: u64,
    top_fraction: f64,
    features: &FeatureConfig,
) -> Result<ChannelRanking> {
    if !(top_fraction > 0.0 && top_fraction <= 1.0) {
        return Err(Error::invalid(format!("top_fraction must lie in (0, 1], got {top_fraction}")));
    }
    let blocks = feature_blocks(segments, features)?;
    rank_from_blocks(segments, &blocks, spec, k, seed, top_fraction)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub threshold: f64,
    pub top_fraction: f64,
    pub k: usize,
    pub seed: u64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            top_fraction: DEFAULT_TOP_FRACTION,
            k: 5,
            seed: crate::DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSelection {
    pub config: SelectionConfig,
    pub adjacency: AdjacencyMatrix,
    pub ranking: ChannelRanking,
    /// All weak pairs before the top-channel filter.
    pub n_weak_pairs: usize,
    /// Kept pairs ranked by combination accuracy, best first.
    pub pairs: Vec<PairCandidate>,
}

/// Full two-channel selection. `rec` supplies the adjacency and must carry
/// the same channels as `segments`.
pub fn select_channel_pairs(
    segments: &[LabeledSegment],
    rec: &RawRecording,
    spec: &AlgoSpec,
    cfg: &SelectionConfig,
    features: &FeatureConfig,
) -> Result<ChannelSelection> {
    if !(cfg.threshold > 0.0 && cfg.threshold <= 1.0) {
        return Err(Error::invalid(format!("threshold must lie in (0, 1], got {}", cfg.threshold)));
    }
    if !(cfg.top_fraction > 0.0 && cfg.top_fraction <= 1.0) {
        return Err(Error::invalid(format!(
            "top_fraction must lie in (0, 1], got {}",
            cfg.top_fraction
        )));
    }
    let blocks = feature_blocks(segments, features)?;
    if blocks[0].len() != rec.n_channels() {
        return Err(Error::ChannelCountMismatch {
            expected: rec.n_channels(),
            found: blocks[0].len(),
        });
    }
    let adjacency = adjacency(rec, AdjacencyKind::AbsPearson, None)?;
    let weak = weak_pairs(&adjacency, cfg.threshold)?;
    let ranking = rank_from_blocks(segments, &blocks, spec, cfg.k, cfg.seed, cfg.top_fraction)?;

    let kept: Vec<PairCandidate> = weak
        .iter()
        .filter(|p| ranking.top_indices.contains(&p.channels.0) || ranking.top_indices.contains(&p.channels.1))
        .cloned()
        .collect();
    if kept.is_empty() {
        return Err(Error::NoQualifyingPairs);
    }
    let mut pairs = kept
        .into_par_iter()
        .map(|mut p| {
            let v = vectors_for(segments, &blocks, &[p.channels.0, p.channels.1]);
            let r = cross_validate(&v, spec, cfg.k, cfg.seed)?;
            p.combo_accuracy = Some(r.pooled_metrics.accuracy);
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    pairs.sort_by(|a, b| {
        let (aa, ba) = (a.combo_accuracy.unwrap_or(0.0), b.combo_accuracy.unwrap_or(0.0));
        ba.total_cmp(&aa)
            .then(a.pearson_r.total_cmp(&b.pearson_r))
            .then(a.channels.cmp(&b.channels))
    });
    Ok(ChannelSelection {
        config: *cfg,
        adjacency,
        ranking,
        n_weak_pairs: weak.len(),
        pairs,
    })
}
