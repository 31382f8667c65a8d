use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use wsf_core::cyclic::{count_subset_sums, ResidueSet};
use wsf_core::measures::sensitivity_report;
use wsf_core::spectrum::walsh_transform;
use wsf_core::weighted_sum::{truth_table, FunctionSpec};

fn tables(c: &mut Criterion) {
    let mut group = c.benchmark_group("truth_table");
    for m in [16, 20] {
        let spec = FunctionSpec::simplified(m).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(m), &spec, |b, spec| {
            b.iter(|| truth_table(black_box(spec)).unwrap())
        });
    }
    group.finish();
}

fn transforms(c: &mut Criterion) {
    let mut group = c.benchmark_group("walsh_transform");
    group.sample_size(20);
    for m in [16, 20] {
        let tt = truth_table(&FunctionSpec::simplified(m).unwrap()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(m), &tt, |b, tt| {
            b.iter(|| walsh_transform(black_box(tt)).unwrap())
        });
    }
    group.finish();
}

fn sensitivity(c: &mut Criterion) {
    let tt = truth_table(&FunctionSpec::simplified(20).unwrap()).unwrap();
    c.bench_function("sensitivity_report/20", |b| {
        b.iter(|| sensitivity_report(black_box(&tt)).unwrap())
    });
}

fn subset_sums(c: &mut Criterion) {
    let set = ResidueSet::excluding(48, &[3, 17]).unwrap();
    c.bench_function("count_subset_sums/46_of_48", |b| {
        b.iter(|| count_subset_sums(black_box(&set)).unwrap())
    });
}

criterion_group!(benches, tables, transforms, sensitivity, subset_sums);
criterion_main!(benches);
