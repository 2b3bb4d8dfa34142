use anyhow::Result;
use clap::Args;
use fnirs_core::synth::{generate_study, write_study};
use fnirs_core::SynthConfig;

use crate::output::write_json;
use crate::{Globals, SignalArg};

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    subjects: u64,

    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    channels: u64,

    #[arg(long, default_value_t = 18, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,

    /// Zero-based channels carrying the response [default: ⌊n/4⌋,⌊3n/4⌋].
    #[arg(long, value_delimiter = ',')]
    informative: Option<Vec<usize>>,

    /// Informative channels take turns: channel r responds on trials t ≡ r.
    #[arg(long)]
    interleaved: bool,

    #[arg(long, default_value_t = 4.0)]
    amplitude: f64,

    #[arg(long, default_value_t = 1.0)]
    noise_sd: f64,

    /// Weight of the noise component common to all channels, in [0, 1).
    #[arg(long, default_value_t = 0.0)]
    shared_noise: f64,

    #[arg(long, default_value_t = 12.0)]
    task_len: f64,

    #[arg(long, default_value_t = 28.0)]
    rest_len: f64,

    #[arg(long, default_value_t = 10.0)]
    fs: f64,

    #[arg(long, value_enum, default_value = "oxy")]
    signal: SignalArg,
}

pub fn run(args: &SynthArgs, g: &Globals) -> Result<()> {
    let n_channels = args.channels as usize;
    let cfg = SynthConfig {
        n_subjects: args.subjects as usize,
        n_channels,
        trials_per_subject: args.trials as usize,
        task_len_s: args.task_len,
        rest_len_s: args.rest_len,
        sampling_rate_hz: args.fs,
        informative_channels: args
            .informative
            .clone()
            .unwrap_or_else(|| SynthConfig::default_informative(n_channels)),
        response_amplitude: args.amplitude,
        noise_sd: args.noise_sd,
        shared_noise_weight: args.shared_noise,
        interleaved: args.interleaved,
        signal_kind: args.signal.into(),
        seed: g.seed,
    };
    let study = generate_study(&cfg)?;
    let out = g.out_dir();
    write_study(&study, &out)?;
    write_json(&out.join("synth_config.json"), &cfg)?;
    log::info!("wrote {} bundles to {}", study.len(), out.display());
    Ok(())
}
