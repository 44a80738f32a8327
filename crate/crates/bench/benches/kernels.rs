use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use katalan_core::bases::{closed_kschur, expand_in_kkschur_with, BasisCache, Solver};
use katalan_core::recursion::{expand_recursive, weight_step};
use katalan_core::{
    evaluate, g_of_vector, IntVec, KatalanSpec, Partition, RootIdeal, RootMultiset,
};

fn p(v: &[i32]) -> Partition {
    Partition::new(v.to_vec()).unwrap()
}

fn determinant(c: &mut Criterion) {
    let v = IntVec::new(vec![4, 3, 3, 2, 1, 1]);
    c.bench_function("g_of_vector 6x6", |b| b.iter(|| g_of_vector(black_box(&v))));
}

fn katalan(c: &mut Criterion) {
    let spec = KatalanSpec::new(
        RootIdeal::full(4),
        RootMultiset::from_counts(vec![0, 1, 1, 2]),
        IntVec::new(vec![3, 2, 2, 1]),
    )
    .unwrap();
    c.bench_function("evaluate full ideal l=4", |b| {
        b.iter(|| evaluate(black_box(&spec)))
    });
}

fn recursion(c: &mut Criterion) {
    let lam = p(&[7, 6, 5, 5, 4, 4, 4, 3, 3, 3, 2, 2, 1]);
    c.bench_function("weight_step l=13", |b| {
        b.iter(|| weight_step(black_box(&lam), 7, 2).unwrap())
    });
    let lam = p(&[5, 4, 3, 3, 2, 2]);
    c.bench_function("expand_recursive (5,4,3,3,2,2)", |b| {
        b.iter(|| expand_recursive(black_box(&lam), 5, 4).unwrap())
    });
}

fn linear(c: &mut Criterion) {
    let lam = p(&[3, 2, 2, 1]);
    let f = closed_kschur(&lam, 3).unwrap();
    let cache = BasisCache::memory();
    let mut g = c.benchmark_group("expand_in_kkschur (3,2,2,1)");
    g.sample_size(20);
    g.bench_function("triangular", |b| {
        b.iter(|| expand_in_kkschur_with(black_box(&f), 3, Solver::Triangular, &cache).unwrap())
    });
    g.bench_function("dense", |b| {
        b.iter(|| expand_in_kkschur_with(black_box(&f), 3, Solver::Dense, &cache).unwrap())
    });
    g.finish();
}

criterion_group!(benches, determinant, katalan, recursion, linear);
criterion_main!(benches);
