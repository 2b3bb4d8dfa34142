//! Per-channel feature matrices and min-max normalization.
//!
//! Every channel of a segment becomes a 4×4 matrix. Rows are the summary
//! statistics (mean, max, min, population variance) of four derived series:
//!
//! | row | series                                                       |
//! |-----|--------------------------------------------------------------|
//! | 0   | the raw samples                                              |
//! | 1   | first principal-component scores of a delay embedding        |
//! | 2   | the first difference scaled to units per second              |
//! | 3   | DFT magnitudes with the DC bin removed                       |
//!
//! A segment with `k` channels flattens to `16 · k` values, channel blocks in
//! ascending channel order and each block row-major.

use std::io::Write;
use std::sync::Arc;

use ndarray::{Array1, Array2, ArrayView2};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::recording::{Label, LabeledSegment};

pub const FEATURES_PER_CHANNEL: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub max: f64,
    pub min: f64,
    pub var: f64,
}

impl Stats {
    pub fn as_array(&self) -> [f64; 4] {
        [self.mean, self.max, self.min, self.var]
    }
}

/// Mean, max, min and population variance (divide by n).
pub fn stats(series: &[f64]) -> Result<Stats> {
    if series.is_empty() {
        return Err(Error::Empty("stats of an empty series"));
    }
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let var = series.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let (min, max) = series
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    Ok(Stats {
        mean,
        max,
        min,
        var,
    })
}

/// First difference times the sampling rate: element i is (x[i+1] − x[i]) · fs.
pub fn slope_series(series: &[f64], fs: f64) -> Result<Vec<f64>> {
    if series.len() < 2 {
        return Err(Error::invalid("slope needs at least 2 samples"));
    }
    Ok(series.windows(2).map(|w| (w[1] - w[0]) * fs).collect())
}

/// |X[k]| for k = 1..n−1 of the length-n DFT.
pub fn fft_magnitudes(series: &[f64]) -> Result<Vec<f64>> {
    let n = series.len();
    if n < 2 {
        return Err(Error::invalid("FFT row needs at least 2 samples"));
    }
    let fft = plan(n);
    let mut buf: Vec<Complex<f64>> = series.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fft.process(&mut buf);
    Ok(buf[1..].iter().map(|c| c.norm()).collect())
}

fn plan(n: usize) -> Arc<dyn rustfft::Fft<f64>> {
    thread_local! {
        static PLANNER: std::cell::RefCell<FftPlanner<f64>> = std::cell::RefCell::new(FftPlanner::new());
    }
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

/// Column-centred delay-embedding matrix, rows x[i..i+embed_dim).
fn centred_embedding(series: &[f64], embed_dim: usize) -> Result<Array2<f64>> {
    if embed_dim < 2 {
        return Err(Error::invalid(format!("embed_dim must be at least 2, got {embed_dim}")));
    }
    if series.len() < embed_dim + 1 {
        return Err(Error::invalid(format!(
            "PCA with embed_dim {embed_dim} needs at least {} samples, got {}",
            embed_dim + 1,
            series.len()
        )));
    }
    let rows = series.len() - embed_dim + 1;
    let mut emb = Array2::from_shape_fn((rows, embed_dim), |(i, j)| series[i + j]);
    for mut col in emb.columns_mut() {
        let mean = col.sum() / rows as f64;
        col.mapv_inplace(|x| x - mean);
    }
    Ok(emb)
}

/// Unit direction of the first principal component of the delay embedding,
/// sign fixed so its first nonzero coordinate is positive.
///
/// `None` for a constant series (zero-variance embedding).
pub fn principal_axis(series: &[f64], embed_dim: usize) -> Result<Option<Vec<f64>>> {
    let emb = centred_embedding(series, embed_dim)?;
    Ok(axis_of(&emb, series))
}

fn axis_of(emb: &Array2<f64>, series: &[f64]) -> Option<Vec<f64>> {
    if series.iter().all(|&x| x == series[0]) {
        return None;
    }
    let cov = emb.t().dot(emb) / emb.nrows() as f64;
    let (values, vectors) = symmetric_eigen(&cov);
    if !(values[0] > 0.0) {
        return None;
    }
    let mut axis = vectors.column(0).to_vec();
    if let Some(first) = axis.iter().find(|v| **v != 0.0) {
        if *first < 0.0 {
            axis.iter_mut().for_each(|v| *v = -*v);
        }
    }
    Some(axis)
}

/// Projection of the centred delay-embedding rows onto the first principal
/// axis; length n − embed_dim + 1. All zeros for a constant series.
pub fn pca_component(series: &[f64], embed_dim: usize) -> Result<Vec<f64>> {
    let emb = centred_embedding(series, embed_dim)?;
    match axis_of(&emb, series) {
        None => Ok(vec![0.0; emb.nrows()]),
        Some(axis) => Ok(emb.dot(&Array1::from(axis)).to_vec()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureRow {
    RawStats,
    PcaStats,
    SlopeStats,
    FftStats,
}

impl FeatureRow {
    pub const ALL: [FeatureRow; 4] = [
        FeatureRow::RawStats,
        FeatureRow::PcaStats,
        FeatureRow::SlopeStats,
        FeatureRow::FftStats,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureColumn {
    Mean,
    Max,
    Min,
    Var,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    values: [[f64; 4]; 4],
}

impl FeatureMatrix {
    pub fn get(&self, row: FeatureRow, column: FeatureColumn) -> f64 {
        self.values[row as usize][column as usize]
    }

    pub fn row(&self, row: FeatureRow) -> [f64; 4] {
        self.values[row as usize]
    }

    pub fn values(&self) -> &[[f64; 4]; 4] {
        &self.values
    }

    /// Row-major flattening.
    pub fn flatten(&self) -> [f64; FEATURES_PER_CHANNEL] {
        let mut out = [0.0; FEATURES_PER_CHANNEL];
        for (i, row) in self.values.iter().enumerate() {
            out[i * 4..i * 4 + 4].copy_from_slice(row);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub sampling_rate_hz: f64,
    /// Delay-embedding width for the PCA row (10 samples = 1 s at 10 Hz).
    pub embed_dim: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            sampling_rate_hz: 10.0,
            embed_dim: 10,
        }
    }
}

pub fn feature_matrix(series: &[f64], fs: f64, embed_dim: usize) -> Result<FeatureMatrix> {
    let raw = stats(series)?;
    let pca = stats(&pca_component(series, embed_dim)?)?;
    let slope = stats(&slope_series(series, fs)?)?;
    let fft = stats(&fft_magnitudes(series)?)?;
    let values = [raw.as_array(), pca.as_array(), slope.as_array(), fft.as_array()];
    if values.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    Ok(FeatureMatrix { values })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub label: Label,
    pub subject_id: String,
    pub trial_index: usize,
}

/// Flattened feature blocks of one segment, one block per channel.
pub fn channel_blocks(
    segment: &LabeledSegment,
    cfg: &FeatureConfig,
) -> Result<Vec<[f64; FEATURES_PER_CHANNEL]>> {
    segment
        .data
        .columns()
        .into_iter()
        .map(|col| {
            let series = col.to_vec();
            feature_matrix(&series, cfg.sampling_rate_hz, cfg.embed_dim).map(|m| m.flatten())
        })
        .collect()
}

/// One feature vector per segment; runs segments in parallel, output in input order.
pub fn extract_features(segments: &[LabeledSegment], cfg: &FeatureConfig) -> Result<Vec<FeatureVector>> {
    let first = segments.first().ok_or(Error::Empty("no segments"))?;
    let k = first.n_channels();
    if let Some(bad) = segments.iter().find(|s| s.n_channels() != k) {
        return Err(Error::ChannelCountMismatch {
            expected: k,
            found: bad.n_channels(),
        });
    }
    segments
        .par_iter()
        .map(|seg| {
            let blocks = channel_blocks(seg, cfg)?;
            Ok(FeatureVector {
                values: blocks.concat(),
                label: seg.label,
                subject_id: seg.subject_id.clone(),
                trial_index: seg.trial_index,
            })
        })
        .collect()
}

/// Stacks vector values into an n × d design matrix with its labels.
pub fn design_matrix(vectors: &[FeatureVector]) -> Result<(Array2<f64>, Vec<Label>)> {
    let first = vectors.first().ok_or(Error::Empty("no feature vectors"))?;
    let d = first.values.len();
    let mut flat = Vec::with_capacity(vectors.len() * d);
    for v in vectors {
        if v.values.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.values.len(),
            });
        }
        flat.extend_from_slice(&v.values);
    }
    let x = Array2::from_shape_vec((vectors.len(), d), flat)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    Ok((x, vectors.iter().map(|v| v.label).collect()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinMaxParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxParams {
    /// Fits on the rows of a design matrix.
    pub fn fit_rows(x: ArrayView2<'_, f64>) -> Result<Self> {
        if x.nrows() == 0 {
            return Err(Error::Empty("min-max fit on no rows"));
        }
        let min = x
            .columns()
            .into_iter()
            .map(|c| c.iter().copied().fold(f64::INFINITY, f64::min))
            .collect();
        let max = x
            .columns()
            .into_iter()
            .map(|c| c.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect();
        Ok(Self { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    fn scale(&self, j: usize, x: f64) -> f64 {
        let span = self.max[j] - self.min[j];
        if span == 0.0 {
            0.0
        } else {
            (x - self.min[j]) / span
        }
    }

    /// (x − min)/(max − min) per column; zero-span columns map to 0, no clamping.
    pub fn transform_rows(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.ncols(),
            });
        }
        Ok(Array2::from_shape_fn(x.dim(), |(i, j)| self.scale(j, x[[i, j]])))
    }
}

pub fn fit_minmax(train: &[FeatureVector]) -> Result<MinMaxParams> {
    if train.is_empty() {
        return Err(Error::Empty("min-max fit on no vectors"));
    }
    let (x, _) = design_matrix(train)?;
    MinMaxParams::fit_rows(x.view())
}

pub fn apply_minmax(params: &MinMaxParams, vectors: &[FeatureVector]) -> Result<Vec<FeatureVector>> {
    vectors
        .iter()
        .map(|v| {
            if v.values.len() != params.dim() {
                return Err(Error::DimensionMismatch {
                    expected: params.dim(),
                    found: v.values.len(),
                });
            }
            Ok(FeatureVector {
                values: v
                    .values
                    .iter()
                    .enumerate()
                    .map(|(j, &x)| params.scale(j, x))
                    .collect(),
                ..v.clone()
            })
        })
        .collect()
}

/// Writes "subject,trial,label,f0..f{D−1}" CSV; labels as 1 (task) / 2 (rest).
pub fn write_feature_csv<W: Write>(mut out: W, vectors: &[FeatureVector]) -> std::io::Result<()> {
    let d = vectors.first().map_or(0, |v| v.values.len());
    write!(out, "subject,trial,label")?;
    for j in 0..d {
        write!(out, ",f{j}")?;
    }
    writeln!(out)?;
    for v in vectors {
        write!(out, "{},{},{}", v.subject_id, v.trial_index, v.label.code())?;
        for x in &v.values {
            write!(out, ",{x}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    #[test]
    fn stats_hand_values() {
        let s = stats(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.as_array(), [2.5, 4.0, 1.0, 1.25]);
        let c = stats(&[7.5; 3]).unwrap();
        assert_eq!(c.as_array(), [7.5, 7.5, 7.5, 0.0]);
        assert!(stats(&[]).is_err());
    }

    #[test]
    fn slope_examples() {
        let s = slope_series(&[0.0, 0.1, 0.3], 10.0).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-12 && (s[1] - 2.0).abs() < 1e-12);
        assert_eq!(slope_series(&[3.0; 5], 10.0).unwrap(), vec![0.0; 4]);
        let ramp: Vec<f64> = (0..20).map(|i| 0.25 * i as f64 / 10.0).collect();
        assert!(slope_series(&ramp, 10.0).unwrap().iter().all(|v| (v - 0.25).abs() < 1e-12));
        assert!(slope_series(&[1.0], 10.0).is_err());
    }

    #[test]
    fn fft_small_cases() {
        let z = fft_magnitudes(&[1.0; 4]).unwrap();
        assert!(z.iter().all(|v| v.abs() < 1e-12));
        let alt = fft_magnitudes(&[1.0, -1.0, 1.0, -1.0]).unwrap();
        let expected = [0.0, 4.0, 0.0];
        for (a, e) in alt.iter().zip(expected) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_segment_matrix() {
        let m = feature_matrix(&[3.0; 30], 10.0, 10).unwrap();
        assert_eq!(m.row(FeatureRow::RawStats), [3.0, 3.0, 3.0, 0.0]);
        for row in [FeatureRow::PcaStats, FeatureRow::SlopeStats, FeatureRow::FftStats] {
            assert!(m.row(row).iter().all(|v| v.abs() < 1e-12), "{row:?}");
        }
    }

    #[test]
    fn pca_needs_enough_samples() {
        assert!(pca_component(&[1.0, 2.0, 3.0], 3).is_err());
        assert_eq!(pca_component(&[1.0, 2.0, 3.0, 5.0], 3).unwrap().len(), 2);
    }

    #[test]
    fn ramp_axis_is_diagonal() {
        let ramp: Vec<f64> = (0..50).map(|i| i as f64 * 0.3).collect();
        let axis = principal_axis(&ramp, 2).unwrap().unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((axis[0] - h).abs() < 1e-10 && (axis[1] - h).abs() < 1e-10);
    }

    fn seg(data: Array2<f64>) -> LabeledSegment {
        LabeledSegment {
            data,
            label: Label::Task,
            subject_id: "S01".into(),
            trial_index: 0,
        }
    }

    #[test]
    fn vector_lengths() {
        let cfg = FeatureConfig::default();
        let one = seg(Array2::from_shape_fn((40, 1), |(i, _)| (i as f64).sin()));
        assert_eq!(extract_features(&[one], &cfg).unwrap()[0].values.len(), 16);
        let many = seg(Array2::from_shape_fn((40, 52), |(i, j)| ((i * (j + 1)) as f64).cos()));
        assert_eq!(extract_features(&[many], &cfg).unwrap()[0].values.len(), 832);
    }

    #[test]
    fn heterogeneous_channels_rejected() {
        let cfg = FeatureConfig::default();
        let a = seg(Array2::from_shape_fn((40, 1), |(i, _)| i as f64));
        let b = seg(Array2::from_shape_fn((40, 2), |(i, j)| (i + j) as f64));
        assert!(extract_features(&[a, b], &cfg).is_err());
    }

    fn fv(values: Vec<f64>) -> FeatureVector {
        FeatureVector {
            values,
            label: Label::Rest,
            subject_id: "S".into(),
            trial_index: 0,
        }
    }

    #[test]
    fn minmax_examples() {
        let train = vec![fv(vec![2.0]), fv(vec![4.0]), fv(vec![6.0])];
        let p = fit_minmax(&train).unwrap();
        assert_eq!((p.min[0], p.max[0]), (2.0, 6.0));
        let out: Vec<f64> = apply_minmax(&p, &train).unwrap().iter().map(|v| v.values[0]).collect();
        assert_eq!(out, vec![0.0, 0.5, 1.0]);

        let single = fit_minmax(&[fv(vec![5.0, -1.0])]).unwrap();
        assert_eq!(single.min, single.max);
        assert_eq!(apply_minmax(&single, &[fv(vec![5.0, -1.0])]).unwrap()[0].values, vec![0.0, 0.0]);

        let wide = MinMaxParams {
            min: vec![0.0],
            max: vec![10.0],
        };
        assert!((apply_minmax(&wide, &[fv(vec![12.0])]).unwrap()[0].values[0] - 1.2).abs() < 1e-15);
        assert!(apply_minmax(&wide, &[fv(vec![1.0, 2.0])]).is_err());
        assert!(fit_minmax(&[]).is_err());
    }

    #[test]
    fn feature_csv_header() {
        let mut buf = Vec::new();
        write_feature_csv(&mut buf, &[fv(vec![0.5, 1.0])]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "subject,trial,label,f0,f1\nS,0,2,0.5,1\n");
    }
}
