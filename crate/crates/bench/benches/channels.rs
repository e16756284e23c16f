use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use torusops::{
    invariant_state, quantum_standard_map, sdc_channel, unitary_channel, DensityMatrix,
    KrausChannel, TorusSpace,
};

fn apply(c: &mut Criterion) {
    let mut group = c.benchmark_group("sdc_apply");
    for n in [32, 64] {
        let space = TorusSpace::periodic(n).unwrap();
        let ch = sdc_channel(&space, 0.5, 0.5).unwrap();
        let rho = DensityMatrix::maximally_mixed(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| ch.apply(black_box(&rho)).unwrap())
        });
    }
    group.finish();
}

fn husimi(c: &mut Criterion) {
    let space = TorusSpace::periodic(64).unwrap();
    let gamma = sdc_channel(&space, 0.5, 0.5).unwrap().gamma();
    c.bench_function("husimi_64_128x128", |b| {
        b.iter(|| space.husimi(black_box(&gamma), 128, 128).unwrap())
    });
}

fn invariant(c: &mut Criterion) {
    let space = TorusSpace::periodic(32).unwrap();
    let noise = sdc_channel(&space, 0.4, 1.0 / 32.0).unwrap();
    let u = unitary_channel(&space, quantum_standard_map(&space, 0.065)).unwrap();
    let ch = KrausChannel::compose(&noise, &u).unwrap();
    let mut group = c.benchmark_group("invariant");
    group.sample_size(10);
    group.bench_function("noisy_standard_map_32", |b| {
        b.iter(|| invariant_state(black_box(&ch), 1e-10, 10_000, None).unwrap())
    });
    group.finish();
}

criterion_group!(benches, apply, husimi, invariant);
criterion_main!(benches);
