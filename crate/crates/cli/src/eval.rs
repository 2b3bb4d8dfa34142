use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;

use anyhow::{Context, Result};
use clap::Args;
use fnirs_core::evaluation::{run_experiment, EvalConfig, Evaluation, ExperimentResult, SubjectOutcome};
use fnirs_core::features::{extract_features, write_feature_csv};
use fnirs_core::{AlgoSpec, ConfusionMatrix, EvalReport, ExperimentMode, Protocol};

use crate::bundles::load_segments;
use crate::output::{fmt6, write_json, write_text};
use crate::{svg, AlgoList, Globals, InputArgs, ModeArg};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ProtocolArg {
    Cv,
    Holdout,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    input: InputArgs,

    /// svm, lr, dt, rf, kn, gnb, lda, mlp, sgd, or all.
    #[arg(long, value_parser = crate::parse_algos, default_value = "lda")]
    algo: AlgoList,

    #[arg(long, value_enum, default_value = "subject-independent")]
    mode: ModeArg,

    #[arg(long, value_enum, default_value = "cv")]
    protocol: ProtocolArg,

    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(2..))]
    folds: u64,

    /// Training share for the holdout protocol.
    #[arg(long, default_value = "0.8", value_parser = crate::unit_fraction)]
    train_fraction: f64,

    /// Also draw the pooled ROC curve of each algorithm.
    #[arg(long)]
    roc: bool,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    #[command(flatten)]
    input: InputArgs,
}

/// Headline numbers of one experiment, averaged over subjects when needed.
struct Summary {
    accuracy: Option<f64>,
    accuracy_sd: Option<f64>,
    tpr: Option<f64>,
    tnr: Option<f64>,
    kappa: Option<f64>,
    f1: Option<f64>,
    auc: Option<f64>,
    confusion: ConfusionMatrix,
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = xs.collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn summarize(result: &ExperimentResult) -> Summary {
    let evals: Vec<&Evaluation> = match &result.pooled {
        Some(e) => vec![e],
        None => result
            .subjects
            .iter()
            .filter_map(|s| match &s.outcome {
                SubjectOutcome::Evaluation(e) => Some(e.as_ref()),
                SubjectOutcome::Error(_) => None,
            })
            .collect(),
    };
    let mut confusion = ConfusionMatrix::default();
    evals.iter().for_each(|e| confusion.merge(e.confusion()));
    let accuracy_sd = match (&result.pooled, result.mode) {
        (Some(Evaluation::KFold(cv)), _) => Some(cv.accuracy_sd),
        (_, ExperimentMode::SubjectDependent) => result.subject_accuracy_sd,
        _ => None,
    };
    let metric = |f: fn(&Evaluation) -> Option<f64>| mean(evals.iter().filter_map(|e| f(e)));
    Summary {
        accuracy: result.accuracy(),
        accuracy_sd,
        tpr: metric(|e| Some(e.metrics().tpr)),
        tnr: metric(|e| Some(e.metrics().tnr)),
        kappa: metric(|e| Some(e.metrics().kappa)),
        f1: metric(|e| Some(e.metrics().f1)),
        auc: metric(|e| e.metrics().auc),
        confusion,
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt6).unwrap_or_default()
}

fn confusion_table(title: &str, cm: &ConfusionMatrix) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{title}");
    let _ = writeln!(s, "{:<10}{:>11}{:>11}", "", "pred task", "pred rest");
    let _ = writeln!(s, "{:<10}{:>11}{:>11}", "true task", cm.tp, cm.fn_);
    let _ = writeln!(s, "{:<10}{:>11}{:>11}", "true rest", cm.fp, cm.tn);
    s
}

pub fn run(args: &EvalArgs, g: &Globals) -> Result<()> {
    let loaded = load_segments(&args.input)?;
    let vectors = extract_features(&loaded.segments, &loaded.features)?;
    let protocol = match args.protocol {
        ProtocolArg::Cv => Protocol::KFold { k: args.folds as usize },
        ProtocolArg::Holdout => Protocol::Holdout {
            train_fraction: args.train_fraction,
        },
    };
    let mode: ExperimentMode = args.mode.into();
    let config = EvalConfig {
        seed: g.seed,
        mode,
        protocol,
        signal_kind: Some(loaded.signal_kind),
        segmentation: loaded.segmentation.clone(),
        features: loaded.features,
        fft_dc_bin_excluded: true,
        normalization: "min-max fitted on training rows".into(),
        n_subjects: loaded.recordings.len(),
        n_vectors: vectors.len(),
    };
    let out = g.out_dir();
    let protocol_name = match args.protocol {
        ProtocolArg::Cv => "cv",
        ProtocolArg::Holdout => "holdout",
    };

    let mut csv = String::from("algorithm,signal_kind,mode,protocol,accuracy,accuracy_sd,tpr,tnr,kappa,f1,auc\n");
    let mut tables = String::new();
    for &family in &args.algo.0 {
        let spec = AlgoSpec::new(family).with_seed(g.seed);
        log::info!("evaluating {family}");
        let result = run_experiment(mode, &vectors, &spec, protocol, g.seed)?;
        let sum = summarize(&result);
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{}",
            family,
            loaded.signal_kind,
            mode.as_str(),
            protocol_name,
            opt(sum.accuracy),
            opt(sum.accuracy_sd),
            opt(sum.tpr),
            opt(sum.tnr),
            opt(sum.kappa),
            opt(sum.f1),
            opt(sum.auc)
        );
        let title = format!("{} ({}, {}, {})", family.full_name(), family, loaded.signal_kind, mode.as_str());
        tables.push_str(&confusion_table(&title, &sum.confusion));
        tables.push('\n');
        if args.roc {
            if let Some(roc) = result.pooled.as_ref().and_then(|e| e.roc()) {
                write_text(&out.join(format!("roc_{family}.svg")), &svg::roc(roc, family.full_name()))?;
            }
        }
        let report = EvalReport {
            config: config.clone(),
            spec,
            result,
        };
        write_json(&out.join(format!("eval_{family}.json")), &report)?;
        if let Some(acc) = sum.accuracy {
            println!("{family}\taccuracy {}", fmt6(acc));
        }
    }
    write_text(&out.join("summary.csv"), &csv)?;
    write_text(&out.join("confusion.txt"), &tables)?;
    Ok(())
}

pub fn run_features(args: &FeaturesArgs, g: &Globals) -> Result<()> {
    let loaded = load_segments(&args.input)?;
    let vectors = extract_features(&loaded.segments, &loaded.features)?;
    let out = g.out_dir();
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join("features.csv");
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    write_feature_csv(BufWriter::new(file), &vectors).with_context(|| format!("writing {}", path.display()))?;
    log::info!("wrote {} feature vectors to {}", vectors.len(), path.display());
    Ok(())
}
