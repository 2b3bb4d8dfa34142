//! Seeded block-design recordings with planted responses.
//!
//! Each trial is a task block followed by a rest block (12 s and 28 s by
//! default). Informative channels carry `amplitude · template` plus noise;
//! every other channel is noise only. The canonical template is the task
//! boxcar convolved with a double-gamma haemodynamic response, scaled to unit
//! peak.
//!
//! With `interleaved` set, informative channel `r` (by position in the list)
//! responds only on trials `t` with `t mod n_informative == r`, so no single
//! informative channel explains every trial but the set of them does.
//!
//! Noise per sample is `noise_sd · (w · common + (1 − w) · own)` with
//! independent standard normals, so `w` dials the correlation between
//! channels.

use std::path::Path;

use ndarray::Array2;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recording::{write, write_recording, EventMarker, Label, RawRecording, SignalKind};
use crate::seeded_rng;

pub const GROUND_TRUTH_FILE: &str = "ground_truth.json";

const GAMMA_6: f64 = 120.0;
const GAMMA_16: f64 = 1_307_674_368_000.0;

/// Canonical double-gamma response, peak near 5 s, undershoot near 15 s.
pub fn hemodynamic_response(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let e = (-t).exp();
    t.powi(5) * e / GAMMA_6 - t.powi(15) * e / (6.0 * GAMMA_16)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_subjects: usize,
    pub n_channels: usize,
    pub trials_per_subject: usize,
    pub task_len_s: f64,
    pub rest_len_s: f64,
    pub sampling_rate_hz: f64,
    pub informative_channels: Vec<usize>,
    pub response_amplitude: f64,
    pub noise_sd: f64,
    pub shared_noise_weight: f64,
    pub interleaved: bool,
    pub signal_kind: SignalKind,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_subjects: 8,
            n_channels: 16,
            trials_per_subject: 18,
            task_len_s: 12.0,
            rest_len_s: 28.0,
            sampling_rate_hz: 10.0,
            informative_channels: SynthConfig::default_informative(16),
            response_amplitude: 4.0,
            noise_sd: 1.0,
            shared_noise_weight: 0.0,
            interleaved: false,
            signal_kind: SignalKind::Oxy,
            seed: crate::DEFAULT_SEED,
        }
    }
}

impl SynthConfig {
    /// Channels ⌊n/4⌋ and ⌊3n/4⌋ (one channel when they coincide).
    pub fn default_informative(n_channels: usize) -> Vec<usize> {
        let mut v = vec![n_channels / 4, 3 * n_channels / 4];
        v.dedup();
        v
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.n_subjects == 0 || self.n_channels == 0 || self.trials_per_subject == 0 {
            return bad("subjects, channels and trials must all be positive".into());
        }
        if !(self.sampling_rate_hz > 0.0 && self.sampling_rate_hz.is_finite()) {
            return bad(format!("sampling rate must be positive, got {}", self.sampling_rate_hz));
        }
        if self.task_samples() == 0 || self.rest_samples() == 0 {
            return bad("task and rest blocks must each span at least one sample".into());
        }
        if let Some(&c) = self.informative_channels.iter().find(|&&c| c >= self.n_channels) {
            return bad(format!("informative channel {c} out of range for {} channels", self.n_channels));
        }
        if !(self.noise_sd > 0.0 && self.noise_sd.is_finite()) {
            return bad(format!("noise_sd must be positive, got {}", self.noise_sd));
        }
        if !self.response_amplitude.is_finite() {
            return bad("response_amplitude must be finite".into());
        }
        if !(0.0..1.0).contains(&self.shared_noise_weight) {
            return bad(format!("shared_noise_weight must lie in [0, 1), got {}", self.shared_noise_weight));
        }
        Ok(())
    }

    pub fn task_samples(&self) -> usize {
        (self.task_len_s * self.sampling_rate_hz).round() as usize
    }

    pub fn rest_samples(&self) -> usize {
        (self.rest_len_s * self.sampling_rate_hz).round() as usize
    }

    pub fn period_samples(&self) -> usize {
        self.task_samples() + self.rest_samples()
    }

    pub fn n_samples(&self) -> usize {
        self.trials_per_subject * self.period_samples()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedChannel {
    pub channel: usize,
    /// Trials whose task block drives this channel.
    pub active_trials: Vec<usize>,
    /// Noiseless unit-peak template, one value per sample.
    pub template: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub subject_id: String,
    pub informative_channels: Vec<usize>,
    pub events: Vec<EventMarker>,
    pub planted: Vec<PlantedChannel>,
}

fn unit_peak(mut v: Vec<f64>) -> Vec<f64> {
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if peak > 0.0 {
        v.iter_mut().for_each(|x| *x /= peak);
    }
    v
}

/// Boxcar over the given trials' task blocks convolved with the response kernel.
fn block_response(cfg: &SynthConfig, active: impl Fn(usize) -> bool) -> Vec<f64> {
    let fs = cfg.sampling_rate_hz;
    let n = cfg.n_samples();
    let period = cfg.period_samples();
    let task = cfg.task_samples();
    let kernel: Vec<f64> = (0..=(40.0 * fs).round() as usize)
        .map(|m| hemodynamic_response(m as f64 / fs) / fs)
        .collect();
    let boxcar: Vec<f64> = (0..n)
        .map(|i| if i % period < task && active(i / period) { 1.0 } else { 0.0 })
        .collect();
    (0..n)
        .map(|i| {
            kernel
                .iter()
                .enumerate()
                .take(i + 1)
                .map(|(m, h)| h * boxcar[i - m])
                .sum()
        })
        .collect()
}

pub fn subject_id(subject_index: usize) -> String {
    format!("S{:02}", subject_index + 1)
}

/// One subject's recording, determined entirely by (cfg, subject_index).
pub fn generate_recording(cfg: &SynthConfig, subject_index: usize) -> Result<(RawRecording, GroundTruth)> {
    cfg.validate()?;
    let n = cfg.n_samples();
    let c = cfg.n_channels;
    let n_inf = cfg.informative_channels.len();
    let planted: Vec<PlantedChannel> = cfg
        .informative_channels
        .iter()
        .enumerate()
        .map(|(rank, &channel)| {
            let template = unit_peak(block_response(cfg, |trial| !cfg.interleaved || trial % n_inf == rank));
            PlantedChannel {
                channel,
                active_trials: (0..cfg.trials_per_subject)
                    .filter(|t| !cfg.interleaved || t % n_inf == rank)
                    .collect(),
                template,
            }
        })
        .collect();

    let mut rng = seeded_rng(cfg.seed.wrapping_add(subject_index as u64));
    let w = cfg.shared_noise_weight;
    let mut data = Array2::zeros((n, c));
    for i in 0..n {
        let common: f64 = StandardNormal.sample(&mut rng);
        for j in 0..c {
            let own: f64 = StandardNormal.sample(&mut rng);
            data[[i, j]] = cfg.noise_sd * (w * common + (1.0 - w) * own);
        }
    }
    for p in &planted {
        for i in 0..n {
            data[[i, p.channel]] += cfg.response_amplitude * p.template[i];
        }
    }

    let period = cfg.period_samples();
    let events: Vec<EventMarker> = (0..cfg.trials_per_subject)
        .flat_map(|t| {
            [
                EventMarker {
                    onset_sample: t * period,
                    label: Label::Task,
                },
                EventMarker {
                    onset_sample: t * period + cfg.task_samples(),
                    label: Label::Rest,
                },
            ]
        })
        .collect();

    let id = subject_id(subject_index);
    let names = (1..=c).map(|k| format!("CH{k:02}")).collect();
    let rec = RawRecording::new(
        id.clone(),
        cfg.signal_kind,
        cfg.sampling_rate_hz,
        data,
        Some(names),
        events.clone(),
    )?;
    let truth = GroundTruth {
        subject_id: id,
        informative_channels: cfg.informative_channels.clone(),
        events,
        planted,
    };
    Ok((rec, truth))
}

/// One recording per subject, each seeded with cfg.seed + subject index.
pub fn generate_study(cfg: &SynthConfig) -> Result<Vec<(RawRecording, GroundTruth)>> {
    cfg.validate()?;
    (0..cfg.n_subjects)
        .into_par_iter()
        .map(|s| generate_recording(cfg, s))
        .collect()
}

/// Writes each subject as `<dir>/<subject_id>/` with a ground_truth.json beside the bundle.
pub fn write_study(study: &[(RawRecording, GroundTruth)], dir: impl AsRef<Path>) -> Result<()> {
    for (rec, truth) in study {
        let sub = dir.as_ref().join(rec.subject_id());
        write_recording(rec, &sub)?;
        let mut json = serde_json::to_string(truth).map_err(|e| Error::Numerical(e.to_string()))?;
        json.push('\n');
        write(&sub.join(GROUND_TRUTH_FILE), &json)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn response_shape() {
        assert_eq!(hemodynamic_response(0.0), 0.0);
        for t in [40.0, 55.0, 80.0] {
            assert!(hemodynamic_response(t).abs() < 1e-6);
        }
        // undershoot after the peak
        assert!(hemodynamic_response(15.0) < 0.0);
    }

    #[test]
    fn block_design_events() {
        let cfg = SynthConfig {
            n_subjects: 1,
            n_channels: 2,
            informative_channels: vec![1],
            ..Default::default()
        };
        let (rec, truth) = generate_recording(&cfg, 0).unwrap();
        assert_eq!(rec.events().len(), 36);
        assert_eq!(truth.events, rec.events());
        let tasks: Vec<usize> = rec.events().iter().filter(|e| e.label == Label::Task).map(|e| e.onset_sample).collect();
        assert!(tasks.windows(2).all(|w| w[1] - w[0] == 400));
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = SynthConfig {
            n_channels: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        cfg.n_channels = 4;
        cfg.informative_channels = vec![4];
        assert!(cfg.validate().is_err());
        cfg.informative_channels = vec![0];
        cfg.noise_sd = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn interleaved_channels_split_trials() {
        let cfg = SynthConfig {
            interleaved: true,
            n_channels: 4,
            informative_channels: vec![0, 1],
            trials_per_subject: 4,
            ..Default::default()
        };
        let (_, truth) = generate_recording(&cfg, 0).unwrap();
        assert_eq!(truth.planted[0].active_trials, vec![0, 2]);
        assert_eq!(truth.planted[1].active_trials, vec![1, 3]);
        for p in &truth.planted {
            let peak = p.template.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            assert!((peak - 1.0).abs() < 1e-12);
        }
        // channel 1 is silent through trial 0's task block
        assert!(truth.planted[1].template[..120].iter().all(|&v| v == 0.0));
    }
}
