use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{CoordinateVector, DenseOperator};
use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, RANK_TOL};

/// Orthogonal projector onto span(basis), stored both as an orthonormal
/// basis Q and as the induced map QQᵀ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projector {
    basis: DenseOperator,
    map: DenseOperator,
    rank: usize,
    orthonormality_defect: f64,
    idempotency_defect: f64,
}

impl Projector {
    pub fn zero(dim: usize) -> Self {
        Self::from_orthonormal(DMatrix::zeros(dim, 0))
    }

    pub(crate) fn from_orthonormal(q: DMatrix<f64>) -> Self {
        let rank = q.ncols();
        let raw = &q * q.transpose();
        let map = (&raw + raw.transpose()) * 0.5;
        let orthonormality_defect = (q.transpose() * &q - DMatrix::identity(rank, rank)).norm();
        let idempotency_defect = (&map * &map - &map).norm();
        Self {
            basis: DenseOperator::from_matrix_unchecked(q),
            map: DenseOperator::from_matrix_unchecked(map),
            rank,
            orthonormality_defect,
            idempotency_defect,
        }
    }

    /// Orthonormal columns spanning the range.
    pub fn basis(&self) -> &DenseOperator {
        &self.basis
    }

    pub fn map(&self) -> &DenseOperator {
        &self.map
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// ‖QᵀQ − I‖_F
    pub fn orthonormality_defect(&self) -> f64 {
        self.orthonormality_defect
    }

    /// ‖(QQᵀ)² − QQᵀ‖_F
    pub fn idempotency_defect(&self) -> f64 {
        self.idempotency_defect
    }

    pub fn apply(&self, x: &CoordinateVector) -> Result<CoordinateVector> {
        self.map.apply(x)
    }

    /// Basis vectors as rows, the layout used by `projector_basis` files.
    pub fn basis_rows(&self) -> Vec<Vec<f64>> {
        self.basis.transpose().to_rows()
    }
}

/// Modified Gram–Schmidt with one re-orthogonalization pass. Inputs whose
/// remainder falls below `RANK_TOL` times the largest input norm are
/// dropped; returns Q and the indices of the inputs that were kept.
pub(crate) fn orthonormalize(dim: usize, vectors: &[&DVector<f64>]) -> (DMatrix<f64>, Vec<usize>) {
    let scale = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut columns: Vec<DVector<f64>> = Vec::new();
    let mut kept = Vec::new();
    if scale == 0.0 {
        return (DMatrix::zeros(dim, 0), kept);
    }
    for (index, v) in vectors.iter().enumerate() {
        let mut w = (*v).clone();
        for _ in 0..2 {
            for q in &columns {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let norm = w.norm();
        if norm > RANK_TOL * scale {
            columns.push(w / norm);
            kept.push(index);
        }
    }
    let q = if columns.is_empty() {
        DMatrix::zeros(dim, 0)
    } else {
        DMatrix::from_columns(&columns)
    };
    (q, kept)
}

/// Builds the orthogonal projector onto the span of `vectors` in ℝ^dim.
/// Linearly dependent inputs are dropped.
pub fn make_projector(
    dim: usize,
    vectors: &[CoordinateVector],
    tol_ortho: f64,
    require_nonzero_rank: bool,
) -> Result<Projector> {
    for v in vectors {
        if v.dim() != dim {
            return Err(Error::DimensionMismatch {
                context: "projector basis vector",
                expected: dim,
                actual: v.dim(),
            });
        }
    }
    let refs: Vec<&DVector<f64>> = vectors.iter().map(|v| v.as_dvector()).collect();
    let (q, _) = orthonormalize(dim, &refs);
    if require_nonzero_rank && q.ncols() == 0 {
        return Err(Error::ZeroRank);
    }
    let p = Projector::from_orthonormal(q);
    debug_assert!(
        p.orthonormality_defect <= tol_ortho.max(1e-12),
        "orthonormality defect {} after re-orthogonalization",
        p.orthonormality_defect
    );
    Ok(p)
}

/// Structural diagnostics of a square linear map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectorReport {
    pub idempotency_defect: f64,
    pub symmetry_defect: f64,
    pub rank: usize,
    pub is_orthogonal_projector: bool,
}

pub fn validate_linear_map(p: &DenseOperator, tol: f64) -> Result<ProjectorReport> {
    if !p.is_square() {
        return Err(Error::NotSquare {
            what: "constraint map",
            rows: p.rows(),
            cols: p.cols(),
        });
    }
    let m = p.as_matrix();
    let idempotency_defect = (m * m - m).norm();
    let symmetry_defect = (m.transpose() - m).norm();
    Ok(ProjectorReport {
        idempotency_defect,
        symmetry_defect,
        rank: numerical_rank(m, RANK_TOL),
        is_orthogonal_projector: idempotency_defect <= tol && symmetry_defect <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> CoordinateVector {
        CoordinateVector::new(c.to_vec()).unwrap()
    }

    fn op(rows: usize, cols: usize, d: &[f64]) -> DenseOperator {
        DenseOperator::from_row_major(rows, cols, d).unwrap()
    }

    #[test]
    fn coordinate_axis() {
        let p = make_projector(2, &[v(&[1.0, 0.0])], 1e-10, true).unwrap();
        assert_eq!(p.rank(), 1);
        assert_eq!(p.map().as_matrix(), op(2, 2, &[1.0, 0.0, 0.0, 0.0]).as_matrix());
    }

    #[test]
    fn diagonal_direction() {
        let p = make_projector(2, &[v(&[1.0, 1.0])], 1e-10, false).unwrap();
        assert_eq!(p.rank(), 1);
        let expected = op(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        assert!((p.map().as_matrix() - expected.as_matrix()).norm() < 1e-15);
    }

    #[test]
    fn empty_basis_gives_zero_map() {
        let p = make_projector(3, &[], 1e-10, false).unwrap();
        assert_eq!(p.rank(), 0);
        assert_eq!(p.map().as_matrix(), &DMatrix::<f64>::zeros(3, 3));
        assert_eq!(make_projector(3, &[], 1e-10, true), Err(Error::ZeroRank));
    }

    #[test]
    fn dependent_inputs_are_dropped() {
        let p = make_projector(3, &[v(&[1.0, 2.0, 0.0]), v(&[2.0, 4.0, 0.0]), v(&[0.0, 0.0, 1.0])], 1e-10, true)
            .unwrap();
        assert_eq!(p.rank(), 2);
        assert_eq!(
            make_projector(2, &[v(&[0.0, 0.0])], 1e-10, true),
            Err(Error::ZeroRank)
        );
    }

    #[test]
    fn wrong_dimension_rejected() {
        assert!(matches!(
            make_projector(3, &[v(&[1.0, 0.0])], 1e-10, false),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn nilpotent_map_is_not_a_projector() {
        let r = validate_linear_map(&op(2, 2, &[0.0, 1.0, 0.0, 0.0]), 1e-10).unwrap();
        assert_eq!(r.idempotency_defect, 1.0);
        assert!(!r.is_orthogonal_projector);
        assert_eq!(r.rank, 1);
    }

    #[test]
    fn coordinate_and_diagonal_projectors_validate() {
        let r = validate_linear_map(&op(2, 2, &[1.0, 0.0, 0.0, 0.0]), 1e-10).unwrap();
        assert_eq!((r.idempotency_defect, r.symmetry_defect, r.rank), (0.0, 0.0, 1));
        assert!(r.is_orthogonal_projector);
        let r = validate_linear_map(&op(2, 2, &[0.5, 0.5, 0.5, 0.5]), 1e-10).unwrap();
        assert_eq!((r.idempotency_defect, r.symmetry_defect, r.rank), (0.0, 0.0, 1));
        assert!(r.is_orthogonal_projector);
    }

    #[test]
    fn non_square_map_rejected() {
        assert!(validate_linear_map(&DenseOperator::zeros(2, 3), 1e-10).is_err());
    }
}
