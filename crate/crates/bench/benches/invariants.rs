use std::collections::BTreeSet;

use criterion::{criterion_group, criterion_main, Criterion};

use gtails_core::{corpus, oracle, VertexId};

fn bench_group_closure(c: &mut Criterion) {
    c.bench_function("closure/e22_z2", |b| b.iter(corpus::e22_z2));
    c.bench_function("closure/nonconstant", |b| {
        b.iter(corpus::nonconstant_restriction_system)
    });
}

fn bench_tails(c: &mut Criterion) {
    let systems = corpus::random_trivial_corpus(7, 10);
    c.bench_function("tails/random_corpus_10", |b| {
        b.iter(|| {
            systems
                .iter()
                .map(|s| s.enumerate_maximal_g_tails().len())
                .sum::<usize>()
        })
    });
}

fn bench_quasi_orbit(c: &mut Criterion) {
    let sys = corpus::e22_z2();
    c.bench_function("quasi_orbit/e22_z2", |b| b.iter(|| sys.quasi_orbit_space()));
    let q = sys.quasi_orbit_space();
    c.bench_function("oracle_order/e22_z2_d12", |b| {
        b.iter(|| oracle::oracle_quasi_order(&sys, &q, 12, 3))
    });
}

fn bench_periodicity(c: &mut Criterion) {
    let sys = corpus::cycle_product_system(2, 3);
    let m: BTreeSet<VertexId> = sys.skeleton.vertex_ids().collect();
    c.bench_function("periodicity/c2xc3_box4", |b| {
        b.iter(|| sys.periodicity_group(&m, 4))
    });
    c.bench_function("mperg/c2xc3_box3", |b| b.iter(|| sys.m_perg(&m, 3)));
}

criterion_group!(
    benches,
    bench_group_closure,
    bench_tails,
    bench_quasi_orbit,
    bench_periodicity
);
criterion_main!(benches);
