use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use chanalloc::alloc::auction::{build_wdp, scenario_bids, solve_wdp, AuctionConfig};
use chanalloc::rng;
use chanalloc::{
    allocate, generate, rho, Algorithm, AllocParams, ChannelSet, Context, GeneratorConfig,
};

fn bench_rho(c: &mut Criterion) {
    let s = generate(&GeneratorConfig::default(), 7).unwrap();
    let sets: Vec<ChannelSet> = [vec![0], vec![0, 1], vec![0, 2, 4, 6]]
        .into_iter()
        .map(|v| v.into_iter().filter(|&ch| ch < s.n_channels()).collect())
        .collect();
    let mut g = c.benchmark_group("rho");
    for set in sets {
        g.bench_function(format!("{} channels", set.len()), |b| {
            b.iter(|| rho(black_box(0), black_box(set), &s).unwrap())
        });
    }
    g.finish();
}

fn bench_allocators(c: &mut Criterion) {
    let s = generate(&GeneratorConfig::default(), 7).unwrap();
    s.single_link_capacity_matrix().unwrap();
    let params = AllocParams::default();
    let mut g = c.benchmark_group("allocate");
    g.sample_size(20);
    for alg in Algorithm::ALL {
        g.bench_function(alg.label(), |b| {
            b.iter_batched(
                || rng::stream(&[7, alg.index()]),
                |mut r| allocate(alg, &s, Context::Capacity, &params, &mut r).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
    g.finish();
}

fn bench_wdp(c: &mut Criterion) {
    let s = generate(&GeneratorConfig::default(), 7).unwrap();
    let matrix = scenario_bids(
        &s,
        Context::Capacity,
        &AuctionConfig::default(),
        &mut rng::stream(&[7]),
    )
    .unwrap();
    let model = build_wdp(&matrix, None);
    let mut g = c.benchmark_group("wdp");
    g.sample_size(10);
    g.bench_function(format!("{} bids", matrix.len()), |b| {
        b.iter(|| solve_wdp(black_box(&model), &matrix).unwrap())
    });
    g.finish();
}

criterion_group!(benches, bench_rho, bench_allocators, bench_wdp);
criterion_main!(benches);
