//! Search benchmarks: one swarm/GA iteration on the default scenario and a
//! complete tiny-scenario run per algorithm.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use les_core::fixtures;
use les_core::optimizer::{self, AlgoConfig, Algorithm};

fn bench_swarm_iterations(c: &mut Criterion) {
    let scn = fixtures::default_scenario();
    let cfg = AlgoConfig {
        seed: 3,
        ..AlgoConfig::default()
    };
    let mut group = c.benchmark_group("one_iteration");
    group.sample_size(20);
    group.bench_function("bpso", |b| {
        b.iter_batched(
            || {
                let mut master = ChaCha8Rng::seed_from_u64(cfg.seed);
                optimizer::init_population(&scn, &cfg, &mut master)
            },
            |mut swarm| optimizer::bpso_step(&mut swarm, &scn, &cfg),
            BatchSize::LargeInput,
        )
    });
    group.bench_function("crbpso", |b| {
        b.iter_batched(
            || {
                let mut master = ChaCha8Rng::seed_from_u64(cfg.seed);
                optimizer::init_population(&scn, &cfg, &mut master)
            },
            |mut swarm| optimizer::crbpso_step(&mut swarm, &scn, &cfg),
            BatchSize::LargeInput,
        )
    });
    group.bench_function("ga", |b| {
        b.iter_batched(
            || {
                let mut master = ChaCha8Rng::seed_from_u64(cfg.seed);
                (optimizer::ga_init(&scn, &cfg, &mut master), master)
            },
            |(mut pop, mut master)| optimizer::ga_step(&mut pop, &scn, &cfg, &mut master),
            BatchSize::LargeInput,
        )
    });
    group.finish();
}

fn bench_tiny_runs(c: &mut Criterion) {
    let scn = fixtures::tiny_scenario(0);
    let mut group = c.benchmark_group("tiny_run");
    group.sample_size(10);
    for algo in [Algorithm::Ga, Algorithm::Bpso, Algorithm::CrBpso] {
        group.bench_function(algo.name(), |b| {
            b.iter(|| {
                let cfg = AlgoConfig {
                    population: 30,
                    iterations: 300,
                    seed: 1,
                    ..AlgoConfig::default()
                };
                optimizer::run(algo, &scn, &cfg)
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_swarm_iterations, bench_tiny_runs);
criterion_main!(benches);
