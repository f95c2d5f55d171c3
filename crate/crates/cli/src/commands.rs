use std::fs;

use finapprox::analyzer::{alpha_sweep_with, decide, range_oracle, AlphaSchedule, Decision, OracleDecision, SweepReport, Verdict};
use finapprox::galerkin::{diagonal_steps, galerkin_sweep_with, GalerkinReport, SubspaceFamily};
use finapprox::hilbert::ValidationRecord;
use finapprox::problem_file::{load_problem, ProblemFile};
use finapprox::scenarios::{build_scenario, ScenarioName, ScenarioSpec};
use finapprox::{Execution, ProblemInstance};
use serde::Serialize;

use crate::args::{InputArgs, OutputArgs, RunArgs};
use crate::error::CliError;
use crate::report::{flag, num, opt_flag, opt_num, render, vector, write, Table};

/// Successful runs either finish normally or report that every α was singular.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    SingularOnly,
}

struct Loaded {
    problem: ProblemInstance,
    family: Option<SubspaceFamily>,
}

fn load(input: &InputArgs) -> Result<Loaded, CliError> {
    if let Some(name) = &input.source.scenario {
        let s = build_scenario(&ScenarioSpec::parse(name, &input.params)?)?;
        return Ok(Loaded {
            problem: s.problem,
            family: s.family,
        });
    }
    let path = input.source.input.as_ref().expect("clap enforces one input source");
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.clone(),
        source,
    })?;
    let problem = load_problem(&text).map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())))?;
    Ok(Loaded { problem, family: None })
}

fn schedule(args: &RunArgs) -> Result<AlphaSchedule, CliError> {
    Ok(AlphaSchedule::new(args.alpha0, args.ratio, args.count)?)
}

fn decision_tol(args: &RunArgs, problem: &ProblemInstance) -> Result<f64, CliError> {
    match args.tol_decision {
        Some(t) if !(t.is_finite() && t > 0.0) => Err(CliError::BadInput(format!("--tol-decision must be positive and finite, got {t}"))),
        Some(t) => Ok(t),
        None => Ok(problem.tolerances().decision),
    }
}

fn emit<T: Serialize>(out: &OutputArgs, command: &str, table: &Table, payload: &T) -> Result<(), CliError> {
    write(&render(out.format, command, table, payload)?, out.output.as_deref())
}

#[derive(Serialize)]
struct AnalyzeReport<'a> {
    decision: &'a Decision,
    oracle: Option<&'a OracleDecision>,
    /// Resolvent verdict matches the constrained oracle; absent when either side has no answer.
    agreement: Option<bool>,
    sweep: &'a SweepReport,
}

pub fn analyze(args: &RunArgs, exec: Execution) -> Result<Status, CliError> {
    let Loaded { problem, .. } = load(&args.input)?;
    let tol = decision_tol(args, &problem)?;
    let sweep = alpha_sweep_with(&problem, &schedule(args)?, exec)?;
    let decision = decide(&sweep, tol);
    let oracle = match problem.l() {
        Some(_) => Some(range_oracle(&problem, problem.tolerances().oracle)?),
        None => None,
    };
    let agreement = match (decision.verdict, &oracle) {
        (Verdict::Solvable, Some(o)) => Some(o.constrained.solvable),
        (Verdict::NotSolvable, Some(o)) => Some(!o.constrained.solvable),
        _ => None,
    };

    let mut table = Table::new(&[
        "verdict",
        "smallest_alpha",
        "final_norm_y",
        "final_step",
        "threshold",
        "singular_count",
        "oracle_decomposed",
        "oracle_constrained",
        "criteria_agree",
        "agreement",
        "witness",
        "kernel_vector",
    ]);
    let d = &decision.diagnostics;
    table.push(vec![
        decision.verdict.to_string(),
        opt_num(d.smallest_nonsingular_alpha),
        opt_num(d.final_norm_y),
        opt_num(d.final_step),
        num(d.threshold),
        d.singular_count.to_string(),
        opt_flag(oracle.as_ref().map(|o| o.decomposed.solvable)),
        opt_flag(oracle.as_ref().map(|o| o.constrained.solvable)),
        opt_flag(oracle.as_ref().map(|o| o.criteria_agree)),
        opt_flag(agreement),
        decision.witness.as_ref().map(|w| vector(w.v.as_slice())).unwrap_or_default(),
        d.kernel_vector.as_ref().map(|k| vector(k.as_slice())).unwrap_or_default(),
    ]);
    let payload = AnalyzeReport {
        decision: &decision,
        oracle: oracle.as_ref(),
        agreement,
        sweep: &sweep,
    };
    emit(&args.output, "analyze", &table, &payload)?;
    Ok(if decision.verdict == Verdict::Singular {
        Status::SingularOnly
    } else {
        Status::Ok
    })
}

pub fn sweep(args: &RunArgs, exec: Execution) -> Result<Status, CliError> {
    let Loaded { problem, .. } = load(&args.input)?;
    let report = alpha_sweep_with(&problem, &schedule(args)?, exec)?;
    let mut table = Table::new(&["alpha", "norm_y", "norm_residual", "norm_constraint_residual", "singular"]);
    for r in &report.records {
        table.push(vec![
            num(r.alpha),
            num(r.norm_y),
            num(r.norm_residual),
            num(r.norm_constraint_residual),
            flag(r.singular),
        ]);
    }
    emit(&args.output, "sweep", &table, &report)?;
    Ok(if report.all_singular() { Status::SingularOnly } else { Status::Ok })
}

pub fn oracle(args: &RunArgs) -> Result<Status, CliError> {
    let Loaded { problem, .. } = load(&args.input)?;
    let o = range_oracle(&problem, problem.tolerances().oracle)?;
    let mut table = Table::new(&[
        "h0_residual",
        "h_perp_residual",
        "decomposed_solvable",
        "feasible",
        "feasibility_residual",
        "distance",
        "constrained_solvable",
        "criteria_agree",
        "control",
    ]);
    table.push(vec![
        num(o.decomposed.h0_residual),
        num(o.decomposed.h_perp_residual),
        flag(o.decomposed.solvable),
        flag(o.constrained.feasible),
        num(o.constrained.feasibility_residual),
        opt_num(o.constrained.distance),
        flag(o.constrained.solvable),
        flag(o.criteria_agree),
        o.constrained.control.as_ref().map(|u| vector(u.as_slice())).unwrap_or_default(),
    ]);
    emit(&args.output, "oracle", &table, &o)?;
    Ok(Status::Ok)
}

pub fn galerkin(args: &RunArgs, steps: usize, exec: Execution) -> Result<Status, CliError> {
    let Loaded { problem, family } = load(&args.input)?;
    // Without a bundled family, refine along the coordinate axes.
    let family = match family {
        Some(f) => f,
        None => SubspaceFamily::canonical(problem.dim_h(), problem.dim_h())?,
    };
    let report: GalerkinReport = galerkin_sweep_with(&problem, &family, &diagonal_steps(steps, family.max_n()), exec)?;
    let mut table = Table::new(&[
        "step",
        "n",
        "alpha",
        "residual",
        "constraint_residual_n",
        "constraint_residual_target",
        "error_formula",
        "singular",
    ]);
    for r in &report.records {
        table.push(vec![
            r.step.to_string(),
            r.n.to_string(),
            num(r.alpha),
            num(r.norm_residual),
            num(r.norm_constraint_residual_n),
            num(r.norm_constraint_residual_target),
            num(r.norm_error_formula),
            flag(r.singular),
        ]);
    }
    emit(&args.output, "galerkin", &table, &report)?;
    Ok(if report.records.iter().all(|r| r.singular) {
        Status::SingularOnly
    } else {
        Status::Ok
    })
}

#[derive(Serialize)]
struct ValidateReport<'a> {
    dim_h: usize,
    dim_u: usize,
    validation: &'a ValidationRecord,
}

pub fn validate(args: &RunArgs) -> Result<Status, CliError> {
    let Loaded { problem, .. } = load(&args.input)?;
    let v = problem.validation();
    let mut table = Table::new(&[
        "dim_h",
        "dim_u",
        "gamma_symmetry_defect",
        "gamma_min_eigenvalue",
        "gram_defect",
        "constraint_idempotency_defect",
        "constraint_symmetry_defect",
        "constraint_rank",
        "constraint_is_projector",
        "raw_constraint",
        "representable",
    ]);
    table.push(vec![
        problem.dim_h().to_string(),
        problem.dim_u().to_string(),
        num(v.gamma_symmetry_defect),
        num(v.gamma_min_eigenvalue),
        opt_num(v.gram_defect),
        num(v.constraint.idempotency_defect),
        num(v.constraint.symmetry_defect),
        v.constraint.rank.to_string(),
        flag(v.constraint.is_orthogonal_projector),
        flag(v.raw_constraint),
        flag(v.representable),
    ]);
    let payload = ValidateReport {
        dim_h: problem.dim_h(),
        dim_u: problem.dim_u(),
        validation: v,
    };
    emit(&args.output, "validate", &table, &payload)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct ScenarioEntry {
    name: &'static str,
    expected_verdict: &'static str,
    params: Vec<(&'static str, &'static str)>,
    summary: &'static str,
}

pub fn scenarios_list(out: &OutputArgs) -> Result<Status, CliError> {
    let entries: Vec<ScenarioEntry> = ScenarioName::ALL
        .iter()
        .map(|n| ScenarioEntry {
            name: n.as_str(),
            expected_verdict: n.expected_verdict().as_str(),
            params: n.params().to_vec(),
            summary: n.summary(),
        })
        .collect();
    let mut table = Table::new(&["name", "expected_verdict", "params", "summary"]);
    for e in &entries {
        let params = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";");
        table.push(vec![e.name.into(), e.expected_verdict.into(), params, e.summary.into()]);
    }
    emit(out, "scenarios-list", &table, &entries)?;
    Ok(Status::Ok)
}

pub fn export(input: &InputArgs, output: Option<&std::path::Path>) -> Result<Status, CliError> {
    let Loaded { problem, .. } = load(input)?;
    let mut text = ProblemFile::from_problem(&problem).to_json();
    text.push('\n');
    write(text.as_bytes(), output)?;
    Ok(Status::Ok)
}

