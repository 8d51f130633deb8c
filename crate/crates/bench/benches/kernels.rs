use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;

use singlab::lo::{canonical_vector, count_subsets_with_sum};
use singlab::props::{expansion_check, SubsetBudget};
use singlab::rank::{certify_graph, exact_rank, IntMatrix};
use singlab::rng::LabRng;
use singlab::sampler::SwitchChain;
use singlab::{ChainConfig, Digraph, Frac, SampleSource};

fn graph(n: usize, d: usize, seed: u64) -> Digraph {
    SampleSource::new(n, d, &ChainConfig::default()).unwrap().sample(seed, 0).unwrap()
}

fn sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("switch_chain");
    for &(n, d) in &[(50usize, 5usize), (200, 20)] {
        let start = Digraph::consecutive_circulant(n, d).unwrap();
        group.bench_with_input(BenchmarkId::new("10k_steps", format!("{n}x{d}")), &start, |b, g| {
            let mut rng = LabRng::seed_from_u64(1);
            let mut chain = SwitchChain::with_frozen_columns(g, &[]);
            b.iter(|| chain.run(black_box(10_000), &mut rng));
        });
    }
    group.finish();
}

fn rank(c: &mut Criterion) {
    let mut group = c.benchmark_group("rank");
    for &(n, d) in &[(50usize, 5usize), (100, 10)] {
        let g = graph(n, d, 3);
        group.bench_with_input(BenchmarkId::new("certify", format!("{n}x{d}")), &g, |b, g| {
            b.iter(|| certify_graph(black_box(g)))
        });
        let m = IntMatrix::from(&g);
        group.bench_with_input(BenchmarkId::new("bareiss", format!("{n}x{d}")), &m, |b, m| {
            b.iter(|| exact_rank(black_box(m)))
        });
    }
    group.finish();
}

fn expansion(c: &mut Criterion) {
    let g = graph(60, 6, 5);
    let budget = SubsetBudget::default();
    c.bench_function("expansion_k3_60x6", |b| {
        let mut rng = LabRng::seed_from_u64(2);
        b.iter(|| expansion_check(black_box(&g), Frac::new(1, 2), 3, budget, &mut rng))
    });
}

fn subset_sums(c: &mut Criterion) {
    let v: Vec<i128> = canonical_vector(7, 14).iter().enumerate().map(|(i, &b)| b as i128 * (i as i128 + 1)).collect();
    c.bench_function("mitm_2d28", |b| b.iter(|| count_subsets_with_sum(black_box(&v), 14, &10)));
}

criterion_group!(benches, sampling, rank, expansion, subset_sums);
criterion_main!(benches);
