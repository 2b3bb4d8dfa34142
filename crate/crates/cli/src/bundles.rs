use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use fnirs_core::recording::{assemble_dataset, load_recording, HEADER_FILE};
use fnirs_core::{FeatureConfig, LabeledSegment, RawRecording, SegmentationConfig, SignalKind};

use crate::InputArgs;

/// Loads one bundle, or every bundle directly under `dir` in name order.
pub fn load_all(dir: &Path) -> Result<Vec<RawRecording>> {
    if dir.join(HEADER_FILE).is_file() {
        return Ok(vec![load_recording(dir).with_context(|| format!("loading {}", dir.display()))?]);
    }
    let mut subdirs: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join(HEADER_FILE).is_file())
        .collect();
    subdirs.sort();
    if subdirs.is_empty() {
        bail!(fnirs_core::Error::Empty("no recording bundles found"));
    }
    subdirs
        .iter()
        .map(|p| load_recording(p).with_context(|| format!("loading {}", p.display())))
        .collect()
}

pub struct Loaded {
    pub recordings: Vec<RawRecording>,
    pub signal_kind: SignalKind,
    pub segmentation: SegmentationConfig,
    pub features: FeatureConfig,
    pub segments: Vec<LabeledSegment>,
}

pub fn load_segments(args: &InputArgs) -> Result<Loaded> {
    let mut recordings = load_all(&args.input)?;
    if let Some(kind) = args.signal.map(SignalKind::from) {
        recordings.retain(|r| r.signal_kind() == kind);
        if recordings.is_empty() {
            bail!(fnirs_core::Error::Empty("no bundles of the requested signal kind"));
        }
    }
    let signal_kind = recordings[0].signal_kind();
    if recordings.iter().any(|r| r.signal_kind() != signal_kind) {
        bail!(fnirs_core::Error::InvalidArgument(
            "bundles mix signal kinds; choose one with --signal".into()
        ));
    }
    let segmentation = SegmentationConfig {
        window_len_samples: args.window as usize,
        onset_delay_samples: args.onset_delay as usize,
        channel_subset: args.channels.clone(),
    };
    let features = FeatureConfig {
        sampling_rate_hz: recordings[0].sampling_rate_hz(),
        embed_dim: args.embed_dim as usize,
    };
    let segments = assemble_dataset(&recordings, &segmentation)?;
    Ok(Loaded {
        recordings,
        signal_kind,
        segmentation,
        features,
        segments,
    })
}
