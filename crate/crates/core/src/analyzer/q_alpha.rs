use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::Result;
use crate::hilbert::{DenseOperator, ProblemInstance};
use crate::linalg::singular_values;
use crate::resolvent::check_alpha;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvertibilityReport {
    pub alpha: f64,
    /// Q_α = I − α(αI + Γ)⁻¹P
    pub q: DenseOperator,
    pub smallest_singular_value: f64,
    pub largest_singular_value: f64,
    pub invertible: bool,
}

pub fn q_alpha_invertibility(alpha: f64, problem: &ProblemInstance) -> Result<InvertibilityReport> {
    check_alpha(alpha)?;
    let n = problem.dim_h();
    let p = problem.constraint_map().as_matrix();
    let shifted = DMatrix::identity(n, n) * alpha + problem.gamma().as_matrix();
    // αI + Γ is SPD for α > 0 and Γ PSD.
    let resolved = match shifted.clone().cholesky() {
        Some(chol) => chol.solve(p),
        None => shifted.lu().solve(p).expect("alpha I + Gamma is nonsingular"),
    };
    let q = DMatrix::identity(n, n) - resolved * alpha;
    let s = singular_values(&q);
    let largest = s.first().copied().unwrap_or(0.0);
    let smallest = s.last().copied().unwrap_or(0.0);
    Ok(InvertibilityReport {
        alpha,
        invertible: largest > 0.0 && smallest >= problem.tolerances().singular * largest,
        q: DenseOperator::from_matrix_unchecked(q),
        smallest_singular_value: smallest,
        largest_singular_value: largest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{make_problem, make_projector, Constraint, CoordinateVector, ProblemData};
    use crate::tolerances::Tolerances;

    fn problem(gamma: &[f64], axes: &[usize]) -> ProblemInstance {
        let dim = gamma.len();
        let vs: Vec<_> = axes.iter().map(|&i| CoordinateVector::unit(dim, i)).collect();
        make_problem(ProblemData {
            l: None,
            gamma: Some(DenseOperator::diagonal(gamma).unwrap()),
            constraint: Constraint::Projector(make_projector(dim, &vs, 1e-10, false).unwrap()),
            h: CoordinateVector::unit(dim, 0),
            dim_u: Some(dim),
            tolerances: Tolerances::default(),
        })
        .unwrap()
    }

    fn assert_diag(q: &DenseOperator, d: &[f64]) {
        let expected = DenseOperator::diagonal(d).unwrap();
        assert!((q.as_matrix() - expected.as_matrix()).norm() < 1e-15, "{q:?}");
    }

    #[test]
    fn identity_gamma() {
        let r = q_alpha_invertibility(1.0, &problem(&[1.0, 1.0], &[0])).unwrap();
        assert_diag(&r.q, &[0.5, 1.0]);
        assert!(r.invertible);
        assert!((r.smallest_singular_value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_projector_gives_identity() {
        for alpha in [1.0, 1e-3] {
            let r = q_alpha_invertibility(alpha, &problem(&[2.0, 0.3, 0.0], &[])).unwrap();
            assert_diag(&r.q, &[1.0, 1.0, 1.0]);
            assert!(r.invertible);
        }
    }

    #[test]
    fn rank_deficient_gamma() {
        let r = q_alpha_invertibility(1.0, &problem(&[1.0, 0.0], &[0])).unwrap();
        assert_diag(&r.q, &[0.5, 1.0]);
        assert!(r.invertible);
    }

    #[test]
    fn kernel_in_constraint_range_makes_q_singular() {
        // Γe₂ = 0 and πe₂ = e₂: Q_α e₂ = e₂ − α/α e₂ = 0.
        let r = q_alpha_invertibility(0.3, &problem(&[1.0, 0.0], &[1])).unwrap();
        assert!(!r.invertible);
    }
}
