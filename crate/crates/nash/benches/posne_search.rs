//! Compares the parallel profile sweep against the sequential reference
//! on a seeded game whose threshold box rejects every profile, which
//! forces both searches to visit the whole space.

use criterion::{criterion_group, criterion_main, Criterion};
use game_core::generator::{corpus_rng, random_game, GeneratorConfig, ObjectiveKind};
use game_core::rational::Rational;
use nash::{positional_profile_count, solve_posne, solve_posne_sequential, ThresholdQuery};
use num::One;

fn bench_sweep(c: &mut Criterion) {
    let mut rng = corpus_rng(0xbe5c);
    let cfg = GeneratorConfig {
        stochastic_percent: 20,
        kinds: vec![ObjectiveKind::Buchi, ObjectiveKind::Parity],
        ..GeneratorConfig::new(2, 9)
    };
    let g = random_game(&cfg, &mut rng);
    let profiles = positional_profile_count(&g).unwrap();
    // Demanding certain victory for both players is unachievable here, so
    // every profile is certified and rejected.
    let q = ThresholdQuery::exact(vec![Rational::one(), Rational::one()]).unwrap();
    assert!(solve_posne(&g, 0, &q, 1 << 22).unwrap().is_none());

    let mut group = c.benchmark_group(format!("full_sweep_{profiles}_profiles"));
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| solve_posne(&g, 0, &q, 1 << 22).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| solve_posne_sequential(&g, 0, &q, 1 << 22).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_sweep);
criterion_main!(benches);
