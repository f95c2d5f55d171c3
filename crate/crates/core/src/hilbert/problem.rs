use serde::Serialize;

use super::{gram, gram_representable, validate_linear_map, CoordinateVector, DenseOperator, Projector, ProjectorReport};
use crate::error::{Error, Result};
use crate::linalg::sym_eigen;
use crate::tolerances::Tolerances;

/// The finite-rank constraint map. Raw maps are admitted so that
/// counterexamples outside the orthogonal-projector setting stay
/// expressible; they are always flagged in the validation record.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", content = "data", rename_all = "snake_case")]
pub enum Constraint {
    Projector(Projector),
    Raw(DenseOperator),
}

impl Constraint {
    pub fn map(&self) -> &DenseOperator {
        match self {
            Constraint::Projector(p) => p.map(),
            Constraint::Raw(m) => m,
        }
    }

    pub fn dim(&self) -> (usize, usize) {
        let m = self.map();
        (m.rows(), m.cols())
    }
}

/// Unvalidated inputs to [`make_problem`].
#[derive(Debug, Clone)]
pub struct ProblemData {
    pub l: Option<DenseOperator>,
    pub gamma: Option<DenseOperator>,
    pub constraint: Constraint,
    pub h: CoordinateVector,
    /// Control-space dimension; taken from L when L is given.
    pub dim_u: Option<usize>,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRecord {
    pub gamma_symmetry_defect: f64,
    pub gamma_min_eigenvalue: f64,
    /// ‖L Lᵀ − Γ‖_F when both were supplied.
    pub gram_defect: Option<f64>,
    pub constraint: ProjectorReport,
    /// Constraint came in as a raw map rather than a projector basis.
    pub raw_constraint: bool,
    /// Γ = L Lᵀ is achievable with the declared control dimension.
    pub representable: bool,
}

/// A validated (L, Γ, π, h) bundle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemInstance {
    l: Option<DenseOperator>,
    gamma: DenseOperator,
    constraint: Constraint,
    h: CoordinateVector,
    dim_h: usize,
    dim_u: usize,
    #[serde(skip)]
    tolerances: Tolerances,
    validation: ValidationRecord,
}

impl ProblemInstance {
    pub fn l(&self) -> Option<&DenseOperator> {
        self.l.as_ref()
    }

    pub fn gamma(&self) -> &DenseOperator {
        &self.gamma
    }

    pub fn constraint(&self) -> &Constraint {
        &self.constraint
    }

    pub fn constraint_map(&self) -> &DenseOperator {
        self.constraint.map()
    }

    pub fn h(&self) -> &CoordinateVector {
        &self.h
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn dim_u(&self) -> usize {
        self.dim_u
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn validation(&self) -> &ValidationRecord {
        &self.validation
    }

    /// True when the constraint map is a symmetric idempotent within
    /// `tol_proj`, which is what the resolvent identities require.
    pub fn constraint_is_projector(&self) -> bool {
        self.validation.constraint.is_orthogonal_projector
    }

    pub fn non_representable(&self) -> bool {
        !self.validation.representable
    }

    /// Same data with a different constraint, revalidated.
    pub fn with_constraint(&self, constraint: Constraint) -> Result<Self> {
        make_problem(ProblemData {
            l: self.l.clone(),
            gamma: Some(self.gamma.clone()),
            constraint,
            h: self.h.clone(),
            dim_u: Some(self.dim_u),
            tolerances: self.tolerances,
        })
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }
}

pub fn make_problem(data: ProblemData) -> Result<ProblemInstance> {
    let ProblemData {
        l,
        gamma,
        constraint,
        h,
        dim_u,
        tolerances: tol,
    } = data;
    let dim_h = h.dim();

    if let Some(l) = &l {
        if l.rows() != dim_h {
            return Err(Error::DimensionMismatch {
                context: "rows of L vs dim of h",
                expected: dim_h,
                actual: l.rows(),
            });
        }
        if let Some(du) = dim_u {
            if du != l.cols() {
                return Err(Error::DimensionMismatch {
                    context: "columns of L vs dimU",
                    expected: du,
                    actual: l.cols(),
                });
            }
        }
    }
    let dim_u = l.as_ref().map(|l| l.cols()).or(dim_u).unwrap_or(dim_h);

    let (rows, cols) = constraint.dim();
    if rows != cols {
        return Err(Error::NotSquare {
            what: "constraint",
            rows,
            cols,
        });
    }
    if rows != dim_h {
        return Err(Error::DimensionMismatch {
            context: "constraint vs dim of h",
            expected: dim_h,
            actual: rows,
        });
    }

    let gamma_given = match (&l, gamma) {
        (None, None) => return Err(Error::MissingOperator),
        (Some(l), None) => gram(l),
        (_, Some(g)) => g,
    };
    if !gamma_given.is_square() || gamma_given.rows() != dim_h {
        return Err(Error::DimensionMismatch {
            context: "Gamma vs dim of h",
            expected: dim_h,
            actual: if gamma_given.is_square() { gamma_given.rows() } else { gamma_given.cols() },
        });
    }

    let gm = gamma_given.as_matrix();
    let scale = gm.norm().max(1.0);
    let gamma_symmetry_defect = (gm - gm.transpose()).norm();
    if gamma_symmetry_defect > tol.sym * scale {
        return Err(Error::GammaAsymmetric {
            defect: gamma_symmetry_defect,
            tolerance: tol.sym * scale,
        });
    }
    let (eigs, _) = sym_eigen(gm);
    let gamma_min_eigenvalue = if dim_h == 0 { 0.0 } else { eigs.min() };
    if gamma_min_eigenvalue < -tol.psd * scale {
        return Err(Error::GammaIndefinite {
            min_eigenvalue: gamma_min_eigenvalue,
            tolerance: tol.psd * scale,
        });
    }
    // Stored exactly symmetric so T_α inherits exact symmetry.
    let gamma = DenseOperator::from_matrix_unchecked((gm + gm.transpose()) * 0.5);

    let gram_defect = match &l {
        Some(l) => {
            let defect = (gram(l).as_matrix() - gamma.as_matrix()).norm();
            if defect > tol.gram * scale {
                return Err(Error::GramInconsistent {
                    defect,
                    tolerance: tol.gram * scale,
                });
            }
            Some(defect)
        }
        None => None,
    };

    let representable = match &l {
        Some(_) => true,
        None => gram_representable(&gamma, dim_u, tol.psd)?.representable,
    };

    let constraint_report = validate_linear_map(constraint.map(), tol.proj)?;
    let raw_constraint = matches!(constraint, Constraint::Raw(_));

    Ok(ProblemInstance {
        l,
        gamma,
        constraint,
        h,
        dim_h,
        dim_u,
        tolerances: tol,
        validation: ValidationRecord {
            gamma_symmetry_defect,
            gamma_min_eigenvalue,
            gram_defect,
            constraint: constraint_report,
            raw_constraint,
            representable,
        },
    })
}
