use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("{what} has {actual} entries, expected {rows}x{cols}")]
    BadShape {
        what: &'static str,
        rows: usize,
        cols: usize,
        actual: usize,
    },
    #[error("{what} must be square, got {rows}x{cols}")]
    NotSquare {
        what: &'static str,
        rows: usize,
        cols: usize,
    },
    #[error("projector has rank 0 but a nonzero rank was required")]
    ZeroRank,
    #[error("Gamma is not symmetric: symmetry defect {defect:e} exceeds {tolerance:e}")]
    GammaAsymmetric { defect: f64, tolerance: f64 },
    #[error("Gamma is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e} below -{tolerance:e}")]
    GammaIndefinite { min_eigenvalue: f64, tolerance: f64 },
    #[error("L and Gamma are inconsistent: |L L^T - Gamma|_F = {defect:e} exceeds {tolerance:e}")]
    GramInconsistent { defect: f64, tolerance: f64 },
    #[error("problem needs at least one of L or Gamma")]
    MissingOperator,
    #[error("regularization parameter must be positive and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("invalid alpha schedule: {0}")]
    InvalidSchedule(String),
    #[error("the range oracle needs L; this problem only carries Gamma")]
    OracleNeedsL,
    #[error("no stable nonzero limit of y_alpha in the sweep; a witness exists only for NOT_SOLVABLE")]
    NoWitness,
    #[error("witness vector is zero")]
    ZeroWitness,
    #[error("subspace family level {level} exceeds max_n = {max_n}")]
    LevelOutOfRange { level: usize, max_n: usize },
    #[error("basis of subspace family level {level} is numerically dependent: rank {rank} < {expected}")]
    DependentLevel {
        level: usize,
        rank: usize,
        expected: usize,
    },
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("invalid parameter for scenario `{scenario}`: {message}")]
    InvalidParam { scenario: String, message: String },
    #[error("malformed problem file: {0}")]
    ProblemFile(String),
    #[error("galerkin sweep needs at least one step")]
    EmptySteps,
}
