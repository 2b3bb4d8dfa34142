use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fnirs_core::channel_selection::{adjacency, AdjacencyKind};
use fnirs_core::classifiers::train;
use fnirs_core::evaluation::cross_validate;
use fnirs_core::features::{design_matrix, extract_features, feature_matrix};
use fnirs_core::recording::{assemble_dataset, concat_recordings};
use fnirs_core::synth::generate_study;
use fnirs_core::{AlgoSpec, Family, FeatureConfig, FeatureVector, RawRecording, SegmentationConfig, SynthConfig};

fn study(n_channels: usize) -> Vec<RawRecording> {
    let cfg = SynthConfig {
        n_subjects: 4,
        n_channels,
        informative_channels: SynthConfig::default_informative(n_channels),
        ..Default::default()
    };
    generate_study(&cfg).unwrap().into_iter().map(|(r, _)| r).collect()
}

fn vectors(n_channels: usize) -> Vec<FeatureVector> {
    let segs = assemble_dataset(&study(n_channels), &SegmentationConfig::default()).unwrap();
    extract_features(&segs, &FeatureConfig::default()).unwrap()
}

fn features(c: &mut Criterion) {
    let rec = &study(1)[0];
    let series = rec.channel(0).to_vec();
    let mut group = c.benchmark_group("feature_matrix");
    for len in [120, 600] {
        group.bench_with_input(BenchmarkId::from_parameter(len), &series[..len], |b, s| {
            b.iter(|| feature_matrix(black_box(s), 10.0, 10).unwrap())
        });
    }
    group.finish();
}

fn adjacency_matrix(c: &mut Criterion) {
    let all = concat_recordings(&study(52)).unwrap();
    let mut group = c.benchmark_group("adjacency_52ch");
    group.sample_size(10);
    group.bench_function("abs_pearson", |b| b.iter(|| adjacency(black_box(&all), AdjacencyKind::AbsPearson, None).unwrap()));
    group.bench_function("mutual_information", |b| {
        b.iter(|| adjacency(black_box(&all), AdjacencyKind::MutualInformation, None).unwrap())
    });
    group.finish();
}

fn lda(c: &mut Criterion) {
    let v = vectors(16);
    let (x, y) = design_matrix(&v).unwrap();
    let spec = AlgoSpec::new(Family::Lda);
    c.bench_function("lda_train_256d", |b| b.iter(|| train(&spec, black_box(x.view()), &y).unwrap()));
}

fn cv(c: &mut Criterion) {
    let v = vectors(16);
    let mut group = c.benchmark_group("cross_validate_5fold");
    group.sample_size(10);
    for family in [Family::Lda, Family::Svm, Family::Rf] {
        let spec = AlgoSpec::new(family);
        group.bench_function(family.abbreviation(), |b| b.iter(|| cross_validate(black_box(&v), &spec, 5, 56).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, features, adjacency_matrix, lda, cv);
criterion_main!(benches);
