use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use finapprox::analyzer::{alpha_sweep_with, decide, AlphaSchedule};
use finapprox::galerkin::{diagonal_steps, galerkin_sweep_with};
use finapprox::random::{random_instance, RandomConfig};
use finapprox::scenarios::{build_scenario, ScenarioName, ScenarioSpec};
use finapprox::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn alpha_sweep_large(c: &mut Criterion) {
    let s = build_scenario(&ScenarioSpec::new(ScenarioName::FunctionSpaceGalerkin).with("M", 128).with("operator", "smoothing")).unwrap();
    let schedule = AlphaSchedule::new(1.0, 0.5, 24).unwrap();
    let mut group = c.benchmark_group("alpha_sweep_m128_24");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| alpha_sweep_with(&s.problem, &schedule, exec).unwrap())
        });
    }
    group.finish();
}

fn random_batch_decide(c: &mut Criterion) {
    let problems: Vec<_> = (0..64).map(|seed| random_instance(seed, &RandomConfig::default()).problem).collect();
    let schedule = AlphaSchedule::default();
    let mut group = c.benchmark_group("decide_random_batch_64");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            // Parallel across instances; each sweep runs sequentially inside.
            b.iter(|| exec.map(&problems, |p| decide(&alpha_sweep_with(p, &schedule, Execution::Sequential).unwrap(), 1e-6).verdict))
        });
    }
    group.finish();
}

fn galerkin_diagonal(c: &mut Criterion) {
    let s = build_scenario(&ScenarioSpec::new(ScenarioName::FunctionSpaceGalerkin).with("M", 128)).unwrap();
    let family = s.family.as_ref().unwrap();
    let steps = diagonal_steps(8, family.max_n());
    let mut group = c.benchmark_group("galerkin_m128_8");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| galerkin_sweep_with(&s.problem, family, &steps, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, alpha_sweep_large, random_batch_decide, galerkin_diagonal);
criterion_main!(benches);
