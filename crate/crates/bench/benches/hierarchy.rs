use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use moyallax_core::drgeom::{extract_intersection_numbers, hamiltonian_density};
use moyallax_core::hierarchy::flow_rhs;
use moyallax_core::{CancelToken, TruncationContext};

fn bench_flows(c: &mut Criterion) {
    let mut group = c.benchmark_group("flow_rhs");
    group.sample_size(10);
    for (d, mu) in [(1u32, 0u32), (1, 4), (2, 0), (2, 2), (3, 0)] {
        let trunc = TruncationContext::with_mu_cap(mu);
        group.bench_with_input(BenchmarkId::new(format!("d{d}"), mu), &trunc, |b, &trunc| {
            b.iter(|| flow_rhs(black_box(d), trunc).unwrap())
        });
    }
    group.finish();
}

fn bench_extraction(c: &mut Criterion) {
    let cancel = CancelToken::new();
    let density = hamiltonian_density(1, TruncationContext::with_mu_cap(4), &cancel).unwrap();
    let (a, b) = ([1i64, 0, -1], [0i64, 1, -1]);
    c.bench_function("extract/d1_g2_k2", |bench| {
        bench.iter(|| extract_intersection_numbers(black_box(&density), 1, 2, 2, &a, &b).unwrap())
    });
}

criterion_group!(benches, bench_flows, bench_extraction);
criterion_main!(benches);
