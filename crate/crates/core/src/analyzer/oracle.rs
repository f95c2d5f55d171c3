use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{CoordinateVector, ProblemInstance};
use crate::linalg::{lstsq, null_space, RANK_TOL};

/// h₀ = Ph reachable through PL and h⊥ = (I − P)h reachable through L.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecomposedVerdict {
    /// min ‖PLu − h₀‖
    pub h0_residual: f64,
    /// min ‖Lu − h⊥‖
    pub h_perp_residual: f64,
    pub solvable: bool,
}

/// min ‖Lu − h‖ subject to PLu = Ph, by null-space elimination.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstrainedVerdict {
    pub feasible: bool,
    /// min ‖PLu − Ph‖ over all u
    pub feasibility_residual: f64,
    /// Distance from h to the constrained image; absent when infeasible.
    pub distance: Option<f64>,
    /// Minimizing control; absent when infeasible.
    pub control: Option<CoordinateVector>,
    pub solvable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleDecision {
    pub decomposed: DecomposedVerdict,
    pub constrained: ConstrainedVerdict,
    /// Whether the two sub-criteria agree. They need not.
    pub criteria_agree: bool,
}

pub fn range_oracle(problem: &ProblemInstance, oracle_tol: f64) -> Result<OracleDecision> {
    let l = problem.l().ok_or(Error::OracleNeedsL)?.as_matrix();
    let p = problem.constraint_map().as_matrix();
    let h = problem.h().as_dvector();
    let bound = oracle_tol * h.norm();

    let pl = p * l;
    let h0 = p * h;
    let h_perp = h - &h0;

    let x0 = lstsq(&pl, &h0, RANK_TOL);
    let h0_residual = (&pl * &x0 - &h0).norm();
    let x1 = lstsq(l, &h_perp, RANK_TOL);
    let h_perp_residual = (l * &x1 - &h_perp).norm();
    let decomposed = DecomposedVerdict {
        h0_residual,
        h_perp_residual,
        solvable: h0_residual <= bound && h_perp_residual <= bound,
    };

    let u_particular = lstsq(&pl, &h0, RANK_TOL);
    let feasibility_residual = (&pl * &u_particular - &h0).norm();
    let feasible = feasibility_residual <= bound;
    let constrained = if feasible {
        let basis = null_space(&pl, RANK_TOL);
        let w = if basis.ncols() == 0 {
            DVector::zeros(0)
        } else {
            lstsq(&(l * &basis), &(h - l * &u_particular), RANK_TOL)
        };
        let u = &u_particular + &basis * w;
        let distance = (l * &u - h).norm();
        ConstrainedVerdict {
            feasible,
            feasibility_residual,
            distance: Some(distance),
            control: Some(CoordinateVector::from_dvector_unchecked(u)),
            solvable: distance <= bound,
        }
    } else {
        ConstrainedVerdict {
            feasible,
            feasibility_residual,
            distance: None,
            control: None,
            solvable: false,
        }
    };

    Ok(OracleDecision {
        criteria_agree: decomposed.solvable == constrained.solvable,
        decomposed,
        constrained,
    })
}
