use std::fmt::Write as _;

use anyhow::Result;
use clap::Args;
use fnirs_core::channel_selection::{
    interpret_correlation, rank_channels, select_channel_pairs, SelectionConfig,
};
use fnirs_core::recording::concat_recordings;
use fnirs_core::{AlgoSpec, Family, FeatureConfig, RawRecording, SegmentationConfig, SignalKind};
use serde::Serialize;

use crate::bundles::load_segments;
use crate::output::{fmt6, write_json, write_text};
use crate::{svg, AlgoList, Globals, InputArgs};

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Classifier used for both the single-channel and the pair scores.
    #[arg(long, value_parser = crate::parse_family, default_value = "lda")]
    algo: Family,

    /// Pairs need |r| strictly below this, in (0, 1].
    #[arg(long, default_value = "0.4", value_parser = crate::unit_fraction)]
    threshold: f64,

    /// Share of channels kept as the top single-channel list, in (0, 1].
    #[arg(long, default_value = "0.2", value_parser = crate::unit_fraction)]
    top_fraction: f64,

    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(2..))]
    folds: u64,

    /// Rows of the accuracy heatmap: family names or "all" [default: --algo].
    #[arg(long, value_delimiter = ',', value_parser = crate::parse_algos)]
    heatmap_algos: Option<Vec<AlgoList>>,
}

#[derive(Serialize)]
struct ReportConfig {
    seed: u64,
    algorithm: AlgoSpec,
    selection: SelectionConfig,
    signal_kind: SignalKind,
    segmentation: SegmentationConfig,
    features: FeatureConfig,
    adjacency: &'static str,
    n_subjects: usize,
    n_segments: usize,
}

#[derive(Serialize)]
struct PairEntry {
    channels: [usize; 2],
    pearson_r: f64,
    interpretation_band: &'static str,
    combo_accuracy: Option<f64>,
}

#[derive(Serialize)]
struct Ranking {
    channels: Vec<usize>,
    accuracies: Vec<f64>,
    top_channels: Vec<usize>,
}

#[derive(Serialize)]
struct SelectionReport {
    config: ReportConfig,
    degenerate_channels: Vec<usize>,
    n_weak_pairs: usize,
    ranking: Ranking,
    pairs: Vec<PairEntry>,
}

fn restrict(rec: RawRecording, channels: &[usize]) -> Result<RawRecording> {
    let data = rec.data().select(ndarray::Axis(1), channels);
    let names = rec
        .channel_names()
        .map(|n| channels.iter().map(|&c| n[c].clone()).collect());
    Ok(RawRecording::new(rec.subject_id(), rec.signal_kind(), rec.sampling_rate_hz(), data, names, Vec::new())?)
}

pub fn run(args: &SelectArgs, g: &Globals) -> Result<()> {
    let loaded = load_segments(&args.input)?;
    let mut all = concat_recordings(&loaded.recordings)?;
    let original: Vec<usize> = match &args.input.channels {
        Some(subset) => {
            all = restrict(all, subset)?;
            subset.clone()
        }
        None => (0..all.n_channels()).collect(),
    };
    let spec = AlgoSpec::new(args.algo).with_seed(g.seed);
    let cfg = SelectionConfig {
        threshold: args.threshold,
        top_fraction: args.top_fraction,
        k: args.folds as usize,
        seed: g.seed,
    };
    let sel = select_channel_pairs(&loaded.segments, &all, &spec, &cfg, &loaded.features)?;

    let pairs = sel
        .pairs
        .iter()
        .map(|p| {
            Ok(PairEntry {
                channels: [original[p.channels.0], original[p.channels.1]],
                pearson_r: p.pearson_r,
                interpretation_band: interpret_correlation(p.pearson_r)?.label(),
                combo_accuracy: p.combo_accuracy,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = SelectionReport {
        config: ReportConfig {
            seed: g.seed,
            algorithm: spec.clone(),
            selection: cfg,
            signal_kind: loaded.signal_kind,
            segmentation: loaded.segmentation.clone(),
            features: loaded.features,
            adjacency: "abs_pearson over all samples of all bundles",
            n_subjects: loaded.recordings.len(),
            n_segments: loaded.segments.len(),
        },
        degenerate_channels: sel.adjacency.degenerate.iter().map(|&c| original[c]).collect(),
        n_weak_pairs: sel.n_weak_pairs,
        ranking: Ranking {
            channels: original.clone(),
            accuracies: sel.ranking.accuracies.clone(),
            top_channels: sel.ranking.top_indices.iter().map(|&c| original[c]).collect(),
        },
        pairs,
    };
    let out = g.out_dir();
    write_json(&out.join("selection.json"), &report)?;

    let mut csv = String::new();
    for row in sel.adjacency.values.rows() {
        let cells: Vec<String> = row.iter().map(|&v| fmt6(v)).collect();
        let _ = writeln!(csv, "{}", cells.join(","));
    }
    write_text(&out.join("adjacency.csv"), &csv)?;
    let labels: Vec<String> = original.iter().map(usize::to_string).collect();
    let grid: Vec<Vec<f64>> = sel.adjacency.values.rows().into_iter().map(|r| r.to_vec()).collect();
    write_text(
        &out.join("adjacency.svg"),
        &svg::heatmap(&grid, &labels, &labels, 0.0, 1.0, "|Pearson r| between channels"),
    )?;

    let rows: Vec<Family> = match &args.heatmap_algos {
        Some(lists) => {
            let mut v: Vec<Family> = lists.iter().flat_map(|l| l.0.iter().copied()).collect();
            v.sort();
            v.dedup();
            v
        }
        None => vec![args.algo],
    };
    let mut acc_rows = Vec::with_capacity(rows.len());
    for &family in &rows {
        if family == args.algo {
            acc_rows.push(sel.ranking.accuracies.clone());
        } else {
            let r = rank_channels(
                &loaded.segments,
                &AlgoSpec::new(family).with_seed(g.seed),
                cfg.k,
                g.seed,
                cfg.top_fraction,
                &loaded.features,
            )?;
            acc_rows.push(r.accuracies);
        }
    }
    let lo = acc_rows.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let hi = acc_rows.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    let row_labels: Vec<String> = rows.iter().map(|f| f.abbreviation().to_uppercase()).collect();
    write_text(
        &out.join("accuracy_heatmap.svg"),
        &svg::heatmap(&acc_rows, &row_labels, &labels, lo, hi, "single-channel accuracy"),
    )?;

    if let Some(best) = report.pairs.first() {
        println!(
            "best pair {:?}\taccuracy {}\t|r| {}",
            best.channels,
            best.combo_accuracy.map(fmt6).unwrap_or_default(),
            fmt6(best.pearson_r)
        );
    }
    Ok(())
}
