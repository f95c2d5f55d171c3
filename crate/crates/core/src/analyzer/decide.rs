use serde::Serialize;

use super::{AlphaSchedule, SweepRecord, SweepReport};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::hilbert::{CoordinateVector, ProblemInstance};
use crate::resolvent::{complement, solve_resolvent};

/// Number of trailing nonsingular records inspected for monotone decay.
const TAIL_LEN: usize = 3;
/// Allowed growth between successive ‖y_α‖ in a vanishing tail.
const TAIL_SLACK: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Solvable,
    NotSolvable,
    Singular,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Solvable => "SOLVABLE",
            Verdict::NotSolvable => "NOT_SOLVABLE",
            Verdict::Singular => "SINGULAR",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Limit of y_α and the test vector v = (I − P)y.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub limit_y: CoordinateVector,
    pub v: CoordinateVector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionDiagnostics {
    pub decision_tol: f64,
    pub h_norm: f64,
    /// decision_tol · ‖h‖
    pub threshold: f64,
    pub smallest_nonsingular_alpha: Option<f64>,
    pub final_norm_y: Option<f64>,
    /// ‖y_last − y_prev‖ over the last two nonsingular records.
    pub final_step: Option<f64>,
    pub singular_count: usize,
    pub kernel_vector: Option<CoordinateVector>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decision {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub diagnostics: DecisionDiagnostics,
}

pub fn decide(report: &SweepReport, decision_tol: f64) -> Decision {
    let threshold = decision_tol * report.h_norm;
    let live: Vec<&SweepRecord> = report.nonsingular().collect();
    let singular_count = report.records.len() - live.len();
    let kernel_vector = report.records.iter().find_map(|r| r.kernel_vector.clone());

    let mut diagnostics = DecisionDiagnostics {
        decision_tol,
        h_norm: report.h_norm,
        threshold,
        smallest_nonsingular_alpha: live.last().map(|r| r.alpha),
        final_norm_y: live.last().map(|r| r.norm_y),
        final_step: None,
        singular_count,
        kernel_vector,
    };

    let Some(last) = live.last() else {
        return Decision {
            verdict: Verdict::Singular,
            witness: None,
            diagnostics,
        };
    };

    let tail = &live[live.len().saturating_sub(TAIL_LEN)..];
    let decaying = tail.windows(2).all(|w| w[1].norm_y <= TAIL_SLACK * w[0].norm_y);
    if last.norm_y <= threshold && decaying {
        return Decision {
            verdict: Verdict::Solvable,
            witness: None,
            diagnostics,
        };
    }

    if live.len() >= 2 {
        let prev = live[live.len() - 2];
        let (Some(y), Some(y_prev)) = (&last.y, &prev.y) else {
            unreachable!("nonsingular records carry y");
        };
        let step = (y.as_dvector() - y_prev.as_dvector()).norm();
        diagnostics.final_step = Some(step);
        // A tail y ≈ c·α also has small steps; extrapolating to α = 0
        // separates a genuine nonzero limit from a slow decay.
        let q = last.alpha / prev.alpha;
        let limit = y.as_dvector() - (y_prev.as_dvector() - y.as_dvector()) * (q / (1.0 - q));
        if step <= threshold && last.norm_y > threshold && limit.norm() > threshold {
            let v = complement(report.constraint_map.as_matrix(), y.as_dvector());
            return Decision {
                verdict: Verdict::NotSolvable,
                witness: Some(Witness {
                    limit_y: y.clone(),
                    v: CoordinateVector::from_dvector_unchecked(v),
                }),
                diagnostics,
            };
        }
    }

    Decision {
        verdict: Verdict::Inconclusive,
        witness: None,
        diagnostics,
    }
}

/// v = (I − P)·lim y_α. Fails unless the sweep certifies NOT_SOLVABLE.
pub fn extract_witness(report: &SweepReport, decision_tol: f64) -> Result<CoordinateVector> {
    decide(report, decision_tol).witness.map(|w| w.v).ok_or(Error::NoWitness)
}

/// ⟨Lu_α − h, v⟩ for every nonsingular α of the schedule.
pub fn witness_correlation(problem: &ProblemInstance, v: &CoordinateVector, schedule: &AlphaSchedule) -> Result<Vec<(f64, f64)>> {
    witness_correlation_with(problem, v, schedule, Execution::default())
}

pub fn witness_correlation_with(
    problem: &ProblemInstance,
    v: &CoordinateVector,
    schedule: &AlphaSchedule,
    exec: Execution,
) -> Result<Vec<(f64, f64)>> {
    if v.dim() != problem.dim_h() {
        return Err(Error::DimensionMismatch {
            context: "witness vector",
            expected: problem.dim_h(),
            actual: v.dim(),
        });
    }
    if v.norm() == 0.0 {
        return Err(Error::ZeroWitness);
    }
    let rows = exec.map(&schedule.values(), |&alpha| {
        solve_resolvent(alpha, problem).map(|out| out.solution().map(|s| (alpha, s.residual.dot(v.as_dvector()))))
    });
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        if let Some(pair) = row? {
            out.push(pair);
        }
    }
    Ok(out)
}
