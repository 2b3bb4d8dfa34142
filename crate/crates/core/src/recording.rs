//! Recording bundles and trial segmentation.
//!
//! A bundle is a directory holding three files:
//!
//! ```text
//! header.json   {"subject_id": "S01", "signal": "oxy", "sampling_rate_hz": 10,
//!                "n_channels": 52, "channel_names": [...]}   (names optional)
//! data.csv      one row per sample, n_channels comma-separated floats, no header
//! events.csv    header "onset_sample,label", then one integer pair per row
//! ```
//!
//! Labels use the dataset's codes: `1` for the mental-arithmetic task and `2`
//! for rest.

use std::fmt;
use std::fs;
use std::path::Path;

use ndarray::{s, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalKind {
    Oxy,
    Deoxy,
    Total,
}

impl SignalKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SignalKind::Oxy => "oxy",
            SignalKind::Deoxy => "deoxy",
            SignalKind::Total => "total",
        }
    }
}

impl fmt::Display for SignalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Binary class of a trial. `Task` is the positive class everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Task,
    Rest,
}

impl Label {
    pub fn code(self) -> u8 {
        match self {
            Label::Task => 1,
            Label::Rest => 2,
        }
    }

    pub fn from_code(code: i64) -> Result<Self> {
        match code {
            1 => Ok(Label::Task),
            2 => Ok(Label::Rest),
            other => Err(Error::InvalidEventLabel(other)),
        }
    }

    pub fn is_task(self) -> bool {
        self == Label::Task
    }

    pub fn flipped(self) -> Self {
        match self {
            Label::Task => Label::Rest,
            Label::Rest => Label::Task,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventMarker {
    pub onset_sample: usize,
    pub label: Label,
}

/// A validated sample × channel recording.
#[derive(Clone, Debug, PartialEq)]
pub struct RawRecording {
    subject_id: String,
    signal_kind: SignalKind,
    sampling_rate_hz: f64,
    data: Array2<f64>,
    channel_names: Option<Vec<String>>,
    events: Vec<EventMarker>,
}

impl RawRecording {
    pub fn new(
        subject_id: impl Into<String>,
        signal_kind: SignalKind,
        sampling_rate_hz: f64,
        data: Array2<f64>,
        channel_names: Option<Vec<String>>,
        events: Vec<EventMarker>,
    ) -> Result<Self> {
        if !(sampling_rate_hz.is_finite() && sampling_rate_hz > 0.0) {
            return Err(Error::invalid(format!(
                "sampling rate must be positive, got {sampling_rate_hz}"
            )));
        }
        let (n_samples, n_channels) = data.dim();
        if n_samples == 0 {
            return Err(Error::Empty("recording has no samples"));
        }
        if n_channels == 0 {
            return Err(Error::Empty("recording has no channels"));
        }
        if let Some(((row, column), _)) = data.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteSample { row, column });
        }
        if let Some(names) = &channel_names {
            if names.len() != n_channels {
                return Err(Error::ChannelCountMismatch {
                    expected: n_channels,
                    found: names.len(),
                });
            }
        }
        for (i, ev) in events.iter().enumerate() {
            if ev.onset_sample >= n_samples {
                return Err(Error::EventOutOfRange {
                    onset: ev.onset_sample,
                    n_samples,
                });
            }
            if i > 0 && events[i - 1].onset_sample >= ev.onset_sample {
                return Err(Error::UnsortedEvents(i));
            }
        }
        Ok(Self {
            subject_id: subject_id.into(),
            signal_kind,
            sampling_rate_hz,
            data,
            channel_names,
            events,
        })
    }

    pub fn subject_id(&self) -> &str {
        &self.subject_id
    }

    pub fn signal_kind(&self) -> SignalKind {
        self.signal_kind
    }

    pub fn sampling_rate_hz(&self) -> f64 {
        self.sampling_rate_hz
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn channel_names(&self) -> Option<&[String]> {
        self.channel_names.as_deref()
    }

    pub fn events(&self) -> &[EventMarker] {
        &self.events
    }

    pub fn n_samples(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_channels(&self) -> usize {
        self.data.ncols()
    }

    pub fn channel(&self, index: usize) -> ArrayView1<'_, f64> {
        self.data.column(index)
    }
}

/// Stacks recordings sample-wise into one recording (events dropped).
///
/// Used to compute channel adjacency over a whole study.
pub fn concat_recordings(recordings: &[RawRecording]) -> Result<RawRecording> {
    let first = recordings.first().ok_or(Error::Empty("no recordings"))?;
    check_compatible(recordings)?;
    let views: Vec<_> = recordings.iter().map(|r| r.data.view()).collect();
    let data = ndarray::concatenate(ndarray::Axis(0), &views)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let subject = if recordings.len() == 1 {
        first.subject_id.clone()
    } else {
        "pooled".to_string()
    };
    RawRecording::new(
        subject,
        first.signal_kind,
        first.sampling_rate_hz,
        data,
        first.channel_names.clone(),
        Vec::new(),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentationConfig {
    pub window_len_samples: usize,
    pub onset_delay_samples: usize,
    pub channel_subset: Option<Vec<usize>>,
}

impl Default for SegmentationConfig {
    /// 120 samples = 12 s at 10 Hz, no delay, all channels.
    fn default() -> Self {
        Self {
            window_len_samples: 120,
            onset_delay_samples: 0,
            channel_subset: None,
        }
    }
}

impl SegmentationConfig {
    fn validate(&self, n_channels: usize) -> Result<()> {
        if self.window_len_samples < 2 {
            return Err(Error::invalid(format!(
                "window_len_samples must be at least 2, got {}",
                self.window_len_samples
            )));
        }
        if let Some(subset) = &self.channel_subset {
            if subset.is_empty() {
                return Err(Error::invalid("channel_subset is empty"));
            }
            if let Some(&bad) = subset.iter().find(|&&c| c >= n_channels) {
                return Err(Error::invalid(format!(
                    "channel index {bad} out of range for {n_channels} channels"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSegment {
    /// window_len × k_channels
    pub data: Array2<f64>,
    pub label: Label,
    pub subject_id: String,
    pub trial_index: usize,
}

impl LabeledSegment {
    pub fn n_channels(&self) -> usize {
        self.data.ncols()
    }
}

/// Segments plus the number of events dropped for overrunning the recording.
#[derive(Clone, Debug)]
pub struct Segmentation {
    pub segments: Vec<LabeledSegment>,
    pub skipped: usize,
}

/// Cuts one fixed-length window per usable event.
pub fn segment_trials(rec: &RawRecording, cfg: &SegmentationConfig) -> Result<Vec<LabeledSegment>> {
    let out = segment_trials_counted(rec, cfg)?;
    if out.skipped > 0 {
        log::warn!(
            "{}: skipped {} event(s) overrunning the recording",
            rec.subject_id,
            out.skipped
        );
    }
    Ok(out.segments)
}

pub fn segment_trials_counted(rec: &RawRecording, cfg: &SegmentationConfig) -> Result<Segmentation> {
    cfg.validate(rec.n_channels())?;
    let all: Vec<usize> = (0..rec.n_channels()).collect();
    let channels = cfg.channel_subset.as_deref().unwrap_or(&all);

    let mut segments = Vec::with_capacity(rec.events.len());
    let mut skipped = 0;
    for (trial_index, ev) in rec.events.iter().enumerate() {
        let start = ev.onset_sample + cfg.onset_delay_samples;
        let end = start + cfg.window_len_samples;
        if end > rec.n_samples() {
            skipped += 1;
            continue;
        }
        let window = rec.data.slice(s![start..end, ..]);
        let data = window.select(ndarray::Axis(1), channels);
        segments.push(LabeledSegment {
            data,
            label: ev.label,
            subject_id: rec.subject_id.clone(),
            trial_index,
        });
    }
    if segments.is_empty() {
        return Err(Error::NoSegments);
    }
    Ok(Segmentation { segments, skipped })
}

fn check_compatible(recordings: &[RawRecording]) -> Result<()> {
    let Some(first) = recordings.first() else {
        return Ok(());
    };
    for rec in &recordings[1..] {
        if rec.n_channels() != first.n_channels() {
            return Err(Error::ChannelCountMismatch {
                expected: first.n_channels(),
                found: rec.n_channels(),
            });
        }
        if rec.sampling_rate_hz != first.sampling_rate_hz {
            return Err(Error::SamplingRateMismatch {
                expected: first.sampling_rate_hz,
                found: rec.sampling_rate_hz,
            });
        }
    }
    Ok(())
}

/// Segments every recording and concatenates in (recording, event) order.
pub fn assemble_dataset(
    recordings: &[RawRecording],
    cfg: &SegmentationConfig,
) -> Result<Vec<LabeledSegment>> {
    if recordings.is_empty() {
        return Err(Error::Empty("no recordings"));
    }
    check_compatible(recordings)?;
    let mut out = Vec::new();
    for rec in recordings {
        out.extend(segment_trials(rec, cfg)?);
    }
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
struct BundleHeader {
    subject_id: String,
    signal: SignalKind,
    sampling_rate_hz: f64,
    n_channels: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    channel_names: Option<Vec<String>>,
}

pub const HEADER_FILE: &str = "header.json";
pub const DATA_FILE: &str = "data.csv";
pub const EVENTS_FILE: &str = "events.csv";

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a recording bundle directory.
pub fn load_recording(dir: impl AsRef<Path>) -> Result<RawRecording> {
    let dir = dir.as_ref();
    let header: BundleHeader = serde_json::from_str(&read(&dir.join(HEADER_FILE))?)
        .map_err(|e| Error::malformed(HEADER_FILE, e.to_string()))?;
    let data = parse_data_csv(&read(&dir.join(DATA_FILE))?)?;
    if data.ncols() != header.n_channels {
        return Err(Error::ChannelCountMismatch {
            expected: header.n_channels,
            found: data.ncols(),
        });
    }
    let events = parse_events_csv(&read(&dir.join(EVENTS_FILE))?)?;
    RawRecording::new(
        header.subject_id,
        header.signal,
        header.sampling_rate_hz,
        data,
        header.channel_names,
        events,
    )
}

fn parse_data_csv(text: &str) -> Result<Array2<f64>> {
    let mut values = Vec::new();
    let mut n_cols = None;
    let mut n_rows = 0;
    for (row, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut count = 0;
        for (column, field) in line.split(',').enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::malformed(
                    DATA_FILE,
                    format!("row {row}, column {column}: cannot parse {field:?}"),
                )
            })?;
            if !v.is_finite() {
                return Err(Error::NonFiniteSample { row, column });
            }
            values.push(v);
            count += 1;
        }
        match n_cols {
            None => n_cols = Some(count),
            Some(c) if c != count => {
                return Err(Error::malformed(
                    DATA_FILE,
                    format!("row {row} has {count} fields, expected {c}"),
                ))
            }
            _ => {}
        }
        n_rows += 1;
    }
    let n_cols = n_cols.ok_or_else(|| Error::malformed(DATA_FILE, "no rows"))?;
    Array2::from_shape_vec((n_rows, n_cols), values)
        .map_err(|e| Error::malformed(DATA_FILE, e.to_string()))
}

fn parse_events_csv(text: &str) -> Result<Vec<EventMarker>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next().map(str::trim) {
        Some("onset_sample,label") => {}
        other => {
            return Err(Error::malformed(
                EVENTS_FILE,
                format!("expected header \"onset_sample,label\", found {other:?}"),
            ))
        }
    }
    let mut events = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [onset, label] = fields[..] else {
            return Err(Error::malformed(
                EVENTS_FILE,
                format!("row {}: expected 2 fields", i + 1),
            ));
        };
        let onset: usize = onset
            .parse()
            .map_err(|_| Error::malformed(EVENTS_FILE, format!("row {}: bad onset {onset:?}", i + 1)))?;
        let label: i64 = label
            .parse()
            .map_err(|_| Error::malformed(EVENTS_FILE, format!("row {}: bad label {label:?}", i + 1)))?;
        events.push(EventMarker {
            onset_sample: onset,
            label: Label::from_code(label)?,
        });
    }
    Ok(events)
}

/// Writes `rec` as a bundle into `dir`, creating it if needed.
///
/// Floats are written in shortest round-trip form, so load(write(r)) == r.
pub fn write_recording(rec: &RawRecording, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let header = BundleHeader {
        subject_id: rec.subject_id.clone(),
        signal: rec.signal_kind,
        sampling_rate_hz: rec.sampling_rate_hz,
        n_channels: rec.n_channels(),
        channel_names: rec.channel_names.clone(),
    };
    let mut json = serde_json::to_string_pretty(&header)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    json.push('\n');
    write(&dir.join(HEADER_FILE), &json)?;

    let mut csv = String::with_capacity(rec.data.len() * 12);
    for row in rec.data.rows() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                csv.push(',');
            }
            csv.push_str(&v.to_string());
        }
        csv.push('\n');
    }
    write(&dir.join(DATA_FILE), &csv)?;

    let mut ev = String::from("onset_sample,label\n");
    for e in &rec.events {
        ev.push_str(&format!("{},{}\n", e.onset_sample, e.label.code()));
    }
    write(&dir.join(EVENTS_FILE), &ev)
}
