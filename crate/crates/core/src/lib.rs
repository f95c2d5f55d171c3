//! Decide and construct finite-approximate solutions of `Lu = h` under an
//! exact finite-rank constraint `P(Lu) = Ph`.
//!
//! The canonical approximations come from the regularized resolvent
//! `T_α = α(I − P) + Γ` with `Γ = L Lᵀ`: `z_α = T_α⁻¹ h`, `u_α = Lᵀ z_α`,
//! `y_α = α z_α`. The equation is finite-approximately solvable iff
//! `y_α → 0` as `α → 0⁺`; otherwise `v = (I − P) lim y_α` is a witness whose
//! correlation with every residual `Lu_α − h` stays bounded away from zero.
//!
//! ```
//! use finapprox::analyzer::{alpha_sweep, decide, AlphaSchedule, Verdict};
//! use finapprox::scenarios::{build_scenario, ScenarioName, ScenarioSpec};
//!
//! let s = build_scenario(&ScenarioSpec::new(ScenarioName::DiagonalUnsolvable)).unwrap();
//! let report = alpha_sweep(&s.problem, &AlphaSchedule::default()).unwrap();
//! let decision = decide(&report, 1e-6);
//! assert_eq!(decision.verdict, Verdict::NotSolvable);
//! ```

pub mod analyzer;
pub mod error;
pub mod exec;
pub mod galerkin;
pub mod hilbert;
mod linalg;
pub mod problem_file;
pub mod random;
pub mod resolvent;
pub mod scenarios;
pub mod tolerances;

pub use error::{Error, Result};
pub use exec::Execution;
pub use hilbert::{CoordinateVector, DenseOperator, ProblemInstance, Projector};
pub use linalg::RANK_TOL;
pub use tolerances::Tolerances;
