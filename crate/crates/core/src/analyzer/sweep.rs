use serde::Serialize;

use super::AlphaSchedule;
use crate::error::Result;
use crate::exec::Execution;
use crate::hilbert::{CoordinateVector, DenseOperator, ProblemInstance};
use crate::resolvent::{solve_resolvent, ResolventOutcome};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub alpha: f64,
    pub norm_y: f64,
    pub norm_residual: f64,
    pub norm_constraint_residual: f64,
    pub singular: bool,
    #[serde(skip)]
    pub y: Option<CoordinateVector>,
    /// Kernel witness of T_α for singular records.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_vector: Option<CoordinateVector>,
}

/// Per-α diagnostics in schedule order (decreasing α).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub records: Vec<SweepRecord>,
    pub h_norm: f64,
    #[serde(skip)]
    pub(crate) constraint_map: DenseOperator,
}

impl SweepReport {
    pub fn nonsingular(&self) -> impl Iterator<Item = &SweepRecord> {
        self.records.iter().filter(|r| !r.singular)
    }

    /// y at the smallest nonsingular α.
    pub fn final_y(&self) -> Option<&CoordinateVector> {
        self.nonsingular().last().and_then(|r| r.y.as_ref())
    }

    pub fn all_singular(&self) -> bool {
        self.records.iter().all(|r| r.singular)
    }

    pub fn constraint_map(&self) -> &DenseOperator {
        &self.constraint_map
    }
}

pub fn alpha_sweep(problem: &ProblemInstance, schedule: &AlphaSchedule) -> Result<SweepReport> {
    alpha_sweep_with(problem, schedule, Execution::default())
}

pub fn alpha_sweep_with(problem: &ProblemInstance, schedule: &AlphaSchedule, exec: Execution) -> Result<SweepReport> {
    let alphas = schedule.values();
    let records = exec
        .map(&alphas, |&alpha| solve_resolvent(alpha, problem).map(|out| record(alpha, out)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport {
        records,
        h_norm: problem.h().norm(),
        constraint_map: problem.constraint_map().clone(),
    })
}

fn record(alpha: f64, outcome: ResolventOutcome) -> SweepRecord {
    match outcome {
        ResolventOutcome::Solved(sol) => SweepRecord {
            alpha,
            norm_y: sol.y.norm(),
            norm_residual: sol.residual.norm(),
            norm_constraint_residual: sol.constraint_residual.norm(),
            singular: false,
            y: Some(sol.y),
            kernel_vector: None,
        },
        ResolventOutcome::Singular(rep) => SweepRecord {
            alpha,
            norm_y: f64::NAN,
            norm_residual: f64::NAN,
            norm_constraint_residual: f64::NAN,
            singular: true,
            y: None,
            kernel_vector: Some(rep.kernel_vector),
        },
    }
}
