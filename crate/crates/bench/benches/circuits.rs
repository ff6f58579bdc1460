use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tropwidth::{build_matrix, compile_held_karp, compile_is, compile_tsp_pw, Variant};
use tropwidth_bench::{dtsp_fixtures, is_fixtures, weights};

fn compile(c: &mut Criterion) {
    let mut group = c.benchmark_group("compile");
    for (name, g, d) in is_fixtures().unwrap() {
        group.bench_with_input(BenchmarkId::new("is", &name), &(g, d), |b, (g, d)| {
            b.iter(|| compile_is(black_box(g), d).unwrap())
        });
    }
    for (name, g, d) in dtsp_fixtures().unwrap() {
        group.bench_with_input(BenchmarkId::new("dtsp", &name), &(g, d), |b, (g, d)| {
            b.iter(|| compile_tsp_pw(black_box(g), d, true).unwrap())
        });
    }
    for n in [6, 9, 12] {
        group.bench_with_input(BenchmarkId::new("held-karp", n), &n, |b, &n| b.iter(|| compile_held_karp(black_box(n)).unwrap()));
    }
    group.finish();
}

fn evaluate(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate");
    for (name, g, d) in dtsp_fixtures().unwrap() {
        let circuit = compile_tsp_pw(&g, &d, true).unwrap();
        let w = weights(circuit.universe().len());
        group.bench_function(BenchmarkId::new("dtsp", &name), |b| b.iter(|| circuit.evaluate_weights(black_box(&w)).unwrap()));
    }
    let hk = compile_held_karp(12).unwrap();
    let w = weights(hk.universe().len());
    group.bench_function("held-karp/12", |b| b.iter(|| hk.evaluate_weights(black_box(&w)).unwrap()));
    group.finish();
}

fn cover(c: &mut Criterion) {
    let mut group = c.benchmark_group("cover");
    group.sample_size(10);
    for k in [2, 3] {
        let m = build_matrix(Variant::Bipartite(k)).unwrap();
        group.bench_with_input(BenchmarkId::new("min-cover", k), &m, |b, m| {
            b.iter(|| m.min_cover(Duration::from_secs(60)).unwrap())
        });
    }
    let m = build_matrix(Variant::Bipartite(4)).unwrap();
    group.bench_function("greedy/4", |b| b.iter(|| m.greedy_cover().unwrap()));
    group.finish();
}

criterion_group!(benches, compile, evaluate, cover);
criterion_main!(benches);
