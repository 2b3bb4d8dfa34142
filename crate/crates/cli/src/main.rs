use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fnirs_core::{ExperimentMode, Family, SignalKind};

mod bundles;
mod eval;
mod output;
mod select;
mod svg;
mod synth;
mod ttest;

/// fNIRS task/rest classification and channel-pair selection.
#[derive(Debug, Parser)]
#[command(name = "fnirs", version)]
struct Cli {
    /// Seed for every random choice in the run.
    #[arg(long, global = true, default_value_t = fnirs_core::DEFAULT_SEED)]
    seed: u64,

    /// Output directory.
    #[arg(short = 'o', long = "out", global = true)]
    out: Option<PathBuf>,

    /// error, warn, info, debug or trace.
    #[arg(long, global = true, default_value = "warn")]
    log_level: log::LevelFilter,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic study as recording bundles.
    Synth(synth::SynthArgs),
    /// Train and score classifiers on recording bundles.
    Eval(eval::EvalArgs),
    /// Rank channels and weakly correlated channel pairs.
    Select(select::SelectArgs),
    /// Welch's t-test on two accuracy samples or summaries.
    Ttest(ttest::TtestArgs),
    /// Dump the per-segment feature vectors as CSV.
    Features(eval::FeaturesArgs),
}

/// Options shared by every command that reads bundles.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// A bundle directory, or a directory of bundle directories.
    #[arg(short = 'i', long = "input")]
    pub input: PathBuf,

    /// Use only bundles of this signal kind.
    #[arg(long, value_enum)]
    pub signal: Option<SignalArg>,

    /// Segment length in samples.
    #[arg(long, default_value_t = 120, value_parser = clap::value_parser!(u64).range(2..))]
    pub window: u64,

    /// Samples skipped after each event onset.
    #[arg(long, default_value_t = 0)]
    pub onset_delay: u64,

    /// Comma-separated zero-based channel indices to keep.
    #[arg(long, value_delimiter = ',')]
    pub channels: Option<Vec<usize>>,

    /// Delay-embedding dimension for the PCA row.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..))]
    pub embed_dim: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignalArg {
    Oxy,
    Deoxy,
    Total,
}

impl From<SignalArg> for SignalKind {
    fn from(s: SignalArg) -> Self {
        match s {
            SignalArg::Oxy => SignalKind::Oxy,
            SignalArg::Deoxy => SignalKind::Deoxy,
            SignalArg::Total => SignalKind::Total,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    SubjectIndependent,
    SubjectDependent,
}

impl From<ModeArg> for ExperimentMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::SubjectIndependent => ExperimentMode::SubjectIndependent,
            ModeArg::SubjectDependent => ExperimentMode::SubjectDependent,
        }
    }
}

pub fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|_| format!("unknown algorithm {s:?} (expected one of svm, lr, dt, rf, kn, gnb, lda, mlp, sgd)"))
}

/// One family, or all nine for "all".
#[derive(Debug, Clone)]
pub struct AlgoList(pub Vec<Family>);

pub fn parse_algos(s: &str) -> Result<AlgoList, String> {
    if s.eq_ignore_ascii_case("all") {
        Ok(AlgoList(Family::ALL.to_vec()))
    } else {
        parse_family(s).map(|f| AlgoList(vec![f]))
    }
}

/// A real in (0, 1].
pub fn unit_fraction(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("must lie in (0, 1], got {v}"))
    }
}

pub struct Globals {
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Globals {
    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("fnirs-out"))
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<fnirs_core::Error>()) {
        Some(e) if e.is_numerical() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    env_logger::Builder::new().filter_level(cli.log_level).init();
    let globals = Globals {
        seed: cli.seed,
        out: cli.out,
    };
    let result = match cli.command {
        Command::Synth(a) => synth::run(&a, &globals),
        Command::Eval(a) => eval::run(&a, &globals),
        Command::Select(a) => select::run(&a, &globals),
        Command::Ttest(a) => ttest::run(&a, &globals),
        Command::Features(a) => eval::run_features(&a, &globals),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
