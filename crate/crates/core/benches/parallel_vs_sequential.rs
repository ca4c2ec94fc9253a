use agentpred::equilibria::{selection_census, SelectorConfig};
use agentpred::games::{dedup_family, sample_games, FamilyConfig, GameSpec, WeightScheme};
use agentpred::stats::{aggregate, sign_permutation_test_with, AggregateConfig, GameComparison};
use agentpred::Exec;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn small_family() -> FamilyConfig {
    FamilyConfig { lower_bounds: (1..=5).collect(), bonus_sizes: (1..=10).collect(), ..FamilyConfig::default() }
}

fn comparisons(n: usize) -> Vec<GameComparison> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    (0..n)
        .map(|i| {
            let terms: Vec<f64> = (0..10).map(|_| rng.random_range(-1.0..1.5)).collect();
            GameComparison { game_id: format!("g{i}"), responses: terms.len(), llr: terms.iter().sum::<f64>() / 10.0, terms }
        })
        .collect()
}

fn bench(c: &mut Criterion) {
    let family = small_family();
    let pop = dedup_family(&family, Exec::Sequential);
    let specs: Vec<GameSpec> = sample_games(&pop, 60, WeightScheme::Uniform, 11).unwrap().draws.into_iter().map(|d| d.spec).collect();
    let comps = comparisons(400);
    let values: Vec<f64> = comps.iter().map(|c| c.llr).collect();

    let mut group = c.benchmark_group("exec");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("dedup", name), &exec, |b, &e| b.iter(|| dedup_family(&family, e).len()));
        group.bench_with_input(BenchmarkId::new("selection", name), &exec, |b, &e| {
            b.iter(|| selection_census(&specs, &SelectorConfig::default(), e).unwrap().games)
        });
        group.bench_with_input(BenchmarkId::new("aggregate", name), &exec, |b, &e| {
            let cfg = AggregateConfig { bootstrap_draws: 2000, permutation_iterations: 2000, exec: e, ..AggregateConfig::new(1) };
            b.iter(|| aggregate(&comps, &cfg).unwrap().mean_llr)
        });
        group.bench_with_input(BenchmarkId::new("permutation", name), &exec, |b, &e| {
            b.iter(|| sign_permutation_test_with(&values, 20_000, 5, e).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
