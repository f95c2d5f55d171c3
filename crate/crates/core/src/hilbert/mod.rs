//! Finite-coordinate vectors, operators and orthogonal projectors, and the
//! validated problem bundle consumed by every analysis.

mod gram;
mod problem;
mod projector;

use std::ops::Deref;

use nalgebra::{DMatrix, DVector};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub use gram::{gram, gram_representable, RepresentabilityReport};
pub use problem::{make_problem, Constraint, ProblemData, ProblemInstance, ValidationRecord};
pub use projector::{make_projector, validate_linear_map, Projector, ProjectorReport};
pub(crate) use projector::orthonormalize;

/// An element of H or U in coordinates. Every entry is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateVector(DVector<f64>);

impl CoordinateVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        Self::from_dvector(DVector::from_vec(coords))
    }

    pub fn from_dvector(v: DVector<f64>) -> Result<Self> {
        if v.iter().all(|x| x.is_finite()) {
            Ok(Self(v))
        } else {
            Err(Error::NonFinite { what: "vector" })
        }
    }

    pub(crate) fn from_dvector_unchecked(v: DVector<f64>) -> Self {
        Self(v)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DVector::zeros(dim))
    }

    /// Unit vector along coordinate `index` (0-based).
    pub fn unit(dim: usize, index: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[index] = 1.0;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_dvector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_dvector(self) -> DVector<f64> {
        self.0
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.0.iter().copied().collect()
    }
}

impl Deref for CoordinateVector {
    type Target = DVector<f64>;

    fn deref(&self) -> &DVector<f64> {
        &self.0
    }
}

impl Serialize for CoordinateVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter())
    }
}

/// A real matrix mapping a `cols`-dimensional space into a
/// `rows`-dimensional one. Every entry is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator(DMatrix<f64>);

impl DenseOperator {
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if m.iter().all(|x| x.is_finite()) {
            Ok(Self(m))
        } else {
            Err(Error::NonFinite { what: "operator" })
        }
    }

    pub(crate) fn from_matrix_unchecked(m: DMatrix<f64>) -> Self {
        Self(m)
    }

    pub fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::BadShape {
                what: "operator",
                rows,
                cols,
                actual: data.len(),
            });
        }
        Self::from_matrix(DMatrix::from_row_slice(rows, cols, data))
    }

    /// Builds from nested rows; every row must have `cols` entries.
    pub fn from_rows(rows: &[Vec<f64>], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::BadShape {
                    what: "operator row",
                    rows: 1,
                    cols,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(rows.len(), cols, &data)
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::from_matrix(DMatrix::from_diagonal(&DVector::from_row_slice(values)))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn apply(&self, x: &CoordinateVector) -> Result<CoordinateVector> {
        if x.dim() != self.cols() {
            return Err(Error::DimensionMismatch {
                context: "operator application",
                expected: self.cols(),
                actual: x.dim(),
            });
        }
        Ok(CoordinateVector(&self.0 * x.as_dvector()))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.0
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }
}

impl Deref for DenseOperator {
    type Target = DMatrix<f64>;

    fn deref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

impl Serialize for DenseOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_coordinates() {
        assert!(CoordinateVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(DenseOperator::from_row_major(1, 2, &[f64::INFINITY, 0.0]).is_err());
    }

    #[test]
    fn rejects_ragged_rows() {
        let err = DenseOperator::from_rows(&[vec![1.0, 2.0], vec![3.0]], 2).unwrap_err();
        assert!(matches!(err, Error::BadShape { actual: 1, .. }));
    }

    #[test]
    fn row_major_layout() {
        let a = DenseOperator::from_row_major(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(a[(0, 2)], 3.0);
        assert_eq!(a[(1, 0)], 4.0);
        assert_eq!(a.to_rows(), vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]);
    }

    #[test]
    fn apply_checks_dimension() {
        let a = DenseOperator::identity(2);
        assert!(a.apply(&CoordinateVector::zeros(3)).is_err());
    }
}
