//! Sequential and parallel execution must give bit-identical results.

use finapprox::analyzer::{alpha_sweep_with, decide, witness_correlation_with, AlphaSchedule};
use finapprox::galerkin::{diagonal_steps, galerkin_sweep_with};
use finapprox::random::{random_instance, RandomConfig};
use finapprox::scenarios::{build_scenario, ScenarioName, ScenarioSpec};
use finapprox::Execution;

#[test]
fn sweeps_agree_across_modes() {
    let schedule = AlphaSchedule::new(1.0, 0.3, 20).unwrap();
    for seed in 0..40 {
        let p = random_instance(seed, &RandomConfig::default()).problem;
        let seq = alpha_sweep_with(&p, &schedule, Execution::Sequential).unwrap();
        let par = alpha_sweep_with(&p, &schedule, Execution::Parallel).unwrap();
        assert_eq!(seq, par, "seed {seed}");
        assert_eq!(decide(&seq, 1e-6), decide(&par, 1e-6));
    }
}

#[test]
fn galerkin_agrees_across_modes() {
    let s = build_scenario(&ScenarioSpec::new(ScenarioName::FunctionSpaceGalerkin).with("M", 96)).unwrap();
    let family = s.family.as_ref().unwrap();
    let steps = diagonal_steps(10, family.max_n());
    let seq = galerkin_sweep_with(&s.problem, family, &steps, Execution::Sequential).unwrap();
    let par = galerkin_sweep_with(&s.problem, family, &steps, Execution::Parallel).unwrap();
    assert_eq!(seq, par);
}

#[test]
fn witness_correlation_agrees_across_modes() {
    let s = build_scenario(&ScenarioSpec::new(ScenarioName::DiagonalUnsolvable)).unwrap();
    let schedule = AlphaSchedule::default();
    let d = decide(&alpha_sweep_with(&s.problem, &schedule, Execution::Sequential).unwrap(), 1e-6);
    let v = d.witness.unwrap().v;
    let seq = witness_correlation_with(&s.problem, &v, &schedule, Execution::Sequential).unwrap();
    let par = witness_correlation_with(&s.problem, &v, &schedule, Execution::Parallel).unwrap();
    assert_eq!(seq, par);
}
