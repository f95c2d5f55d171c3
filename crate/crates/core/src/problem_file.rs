//! JSON problem files.
//!
//! ```json
//! {
//!   "dimH": 2, "dimU": 1,
//!   "L": [[1.0], [0.0]],
//!   "constraint": {"type": "projector_basis", "data": [[1.0, 0.0]]},
//!   "h": [0.0, 1.0],
//!   "tolerances": {"decision": 1e-6}
//! }
//! ```
//!
//! `L` is dimH×dimU and `Gamma` dimH×dimH, both as nested rows. A
//! `projector_basis` constraint lists spanning vectors of H₀ (one per row);
//! a `raw` constraint is the dimH×dimH matrix itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{make_problem, make_projector, Constraint, CoordinateVector, DenseOperator, ProblemData, ProblemInstance};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "data", rename_all = "snake_case")]
pub enum ConstraintSpec {
    ProjectorBasis(Vec<Vec<f64>>),
    Raw(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(rename = "dimH")]
    pub dim_h: usize,
    #[serde(rename = "dimU")]
    pub dim_u: usize,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<Vec<Vec<f64>>>,
    #[serde(rename = "Gamma", default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<Vec<f64>>>,
    pub constraint: ConstraintSpec,
    pub h: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
}

fn field_error(field: &str, e: impl std::fmt::Display) -> Error {
    Error::ProblemFile(format!("field `{field}`: {e}"))
}

fn matrix(field: &str, rows: &[Vec<f64>], expect_rows: usize, expect_cols: usize) -> Result<DenseOperator> {
    if rows.len() != expect_rows {
        return Err(field_error(field, format!("expected {expect_rows} rows, got {}", rows.len())));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != expect_cols {
            return Err(field_error(field, format!("row {i} has {} entries, expected {expect_cols}", row.len())));
        }
    }
    DenseOperator::from_rows(rows, expect_cols).map_err(|e| field_error(field, e))
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ProblemFile(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem file serializes")
    }

    pub fn into_problem(self) -> Result<ProblemInstance> {
        let (n, m) = (self.dim_h, self.dim_u);
        if n == 0 {
            return Err(field_error("dimH", "must be positive"));
        }
        if m == 0 {
            return Err(field_error("dimU", "must be positive"));
        }
        if self.h.len() != n {
            return Err(field_error("h", format!("expected {n} entries, got {}", self.h.len())));
        }
        let h = CoordinateVector::new(self.h).map_err(|e| field_error("h", e))?;
        let l = self.l.as_deref().map(|rows| matrix("L", rows, n, m)).transpose()?;
        let gamma = self.gamma.as_deref().map(|rows| matrix("Gamma", rows, n, n)).transpose()?;
        let tolerances = self.tolerances.unwrap_or_default();
        let constraint = match &self.constraint {
            ConstraintSpec::ProjectorBasis(rows) => {
                let mut basis = Vec::with_capacity(rows.len());
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != n {
                        return Err(field_error("constraint.data", format!("basis vector {i} has {} entries, expected {n}", row.len())));
                    }
                    basis.push(CoordinateVector::new(row.clone()).map_err(|e| field_error("constraint.data", e))?);
                }
                Constraint::Projector(make_projector(n, &basis, tolerances.ortho, false)?)
            }
            ConstraintSpec::Raw(rows) => Constraint::Raw(matrix("constraint.data", rows, n, n)?),
        };
        make_problem(ProblemData {
            l,
            gamma,
            constraint,
            h,
            dim_u: Some(m),
            tolerances,
        })
    }

    pub fn from_problem(problem: &ProblemInstance) -> Self {
        let constraint = match problem.constraint() {
            Constraint::Projector(p) => ConstraintSpec::ProjectorBasis(p.basis_rows()),
            Constraint::Raw(m) => ConstraintSpec::Raw(m.to_rows()),
        };
        Self {
            dim_h: problem.dim_h(),
            dim_u: problem.dim_u(),
            l: problem.l().map(DenseOperator::to_rows),
            gamma: Some(problem.gamma().to_rows()),
            constraint,
            h: problem.h().to_vec(),
            tolerances: Some(*problem.tolerances()),
        }
    }
}

pub fn load_problem(text: &str) -> Result<ProblemInstance> {
    ProblemFile::parse(text)?.into_problem()
}
