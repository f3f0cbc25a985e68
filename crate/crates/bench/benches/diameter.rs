use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use geodiam_bench::{disk_centers, segments, sparse_disks, square_centers};
use geodiam_core::oracle::diameter_at_most;
use geodiam_core::segments::segment_diam_at_most;
use geodiam_core::unit_disk::decide_diam2;
use geodiam_core::unit_square::unit_square_diam_at_most;
use geodiam_core::{build_graph, PredicateConfig};
use std::hint::black_box;

fn unit_disk_diam2(c: &mut Criterion) {
    let mut group = c.benchmark_group("unitdisk2");
    group.sample_size(10);
    for n in [1000, 2000, 4000, 8000] {
        let pts = disk_centers(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &pts, |b, pts| {
            b.iter(|| decide_diam2(black_box(pts)).unwrap())
        });
    }
    group.finish();
}

fn unit_square_diam3(c: &mut Criterion) {
    let mut group = c.benchmark_group("unitsquare_delta3");
    group.sample_size(10);
    for n in [1000, 2000, 4000] {
        let pts = square_centers(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &pts, |b, pts| {
            b.iter(|| unit_square_diam_at_most(black_box(pts), 3).unwrap())
        });
    }
    group.finish();
}

fn segment_diam2(c: &mut Criterion) {
    let mut group = c.benchmark_group("segments_h3_delta2");
    group.sample_size(10);
    for n in [100, 200, 400] {
        let segs = segments(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &segs, |b, segs| {
            b.iter(|| segment_diam_at_most(black_box(segs), 2, 3).unwrap())
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_disks");
    group.sample_size(10);
    let cfg = PredicateConfig::default();
    for n in [500, 1000, 2000] {
        let shapes = sparse_disks(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &shapes, |b, shapes| {
            b.iter(|| diameter_at_most(&build_graph(black_box(shapes), &cfg).unwrap(), 2))
        });
    }
    group.finish();
}

criterion_group!(benches, unit_disk_diam2, unit_square_diam3, segment_diam2, oracle);
criterion_main!(benches);
