use nalgebra::DMatrix;
use serde::Serialize;

use super::DenseOperator;
use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, symmetrize, RANK_TOL};

/// Γ = L Lᵀ, symmetrized so the result is exactly symmetric.
pub fn gram(l: &DenseOperator) -> DenseOperator {
    let m = l.as_matrix();
    DenseOperator::from_matrix_unchecked(symmetrize(&(m * m.transpose())))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepresentabilityReport {
    pub representable: bool,
    pub symmetry_defect: f64,
    pub min_eigenvalue: f64,
    pub rank: usize,
    pub dim_u: usize,
    /// A factor L with L Lᵀ = Γ, present iff representable.
    pub factor: Option<DenseOperator>,
}

/// Decides whether Γ = L Lᵀ for some L: ℝ^dim_u → ℝ^n, i.e. Γ is symmetric
/// PSD and has numerical rank at most `dim_u`.
pub fn gram_representable(gamma: &DenseOperator, dim_u: usize, tol: f64) -> Result<RepresentabilityReport> {
    if !gamma.is_square() {
        return Err(Error::NotSquare {
            what: "Gamma",
            rows: gamma.rows(),
            cols: gamma.cols(),
        });
    }
    let n = gamma.rows();
    let m = gamma.as_matrix();
    let scale = m.norm().max(1.0);
    let symmetry_defect = (m - m.transpose()).norm();
    let (values, vectors) = sym_eigen(m);
    let min_eigenvalue = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max_eigenvalue = values.iter().copied().fold(0.0, f64::max);
    let cutoff = RANK_TOL * max_eigenvalue;
    let rank = values.iter().filter(|&&l| l > cutoff).count();

    let symmetric = symmetry_defect <= tol * scale;
    let psd = n == 0 || min_eigenvalue >= -tol * scale;
    let representable = symmetric && psd && rank <= dim_u;

    let factor = representable.then(|| {
        let mut l = DMatrix::zeros(n, dim_u);
        // Largest eigenpairs first.
        for (col, idx) in (0..n).rev().take(rank).enumerate() {
            l.set_column(col, &(vectors.column(idx) * values[idx].sqrt()));
        }
        DenseOperator::from_matrix_unchecked(l)
    });

    Ok(RepresentabilityReport {
        representable,
        symmetry_defect,
        min_eigenvalue: if n == 0 { 0.0 } else { min_eigenvalue },
        rank,
        dim_u,
        factor,
    })
}
