//! The regularized resolvent T_α = α(I − P) + Γ, its solve, and the
//! algebraic identities satisfied by the canonical controls.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{CoordinateVector, DenseOperator, ProblemInstance};
use crate::linalg::{matvec_split, right_singular_basis, sym_eigen, Compensated, SplitVector};

/// Upper bound on mixed-precision refinement sweeps; each one gains a
/// factor of roughly cond(T_α)·ε.
const MAX_REFINEMENT_STEPS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolventSolution {
    pub alpha: f64,
    /// z = T_α⁻¹ h
    pub z: CoordinateVector,
    /// Low-order part of the refined solution; z + z_tail carries about
    /// twice the working precision.
    #[serde(skip)]
    pub(crate) z_tail: CoordinateVector,
    /// u = Lᵀ z; absent when the problem carries no L.
    pub u: Option<CoordinateVector>,
    /// L u = Γ z
    pub l_u: CoordinateVector,
    /// y = α z
    pub y: CoordinateVector,
    /// L u − h
    pub residual: CoordinateVector,
    /// P (L u − h)
    pub constraint_residual: CoordinateVector,
}

/// T_α is numerically singular; `kernel_vector` is a unit element of its
/// null space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularReport {
    pub alpha: f64,
    pub kernel_vector: CoordinateVector,
    /// Eigenvalue of smallest magnitude when T_α is symmetric, otherwise
    /// the smallest singular value.
    pub smallest_eigenvalue: f64,
    /// Dimension of the numerical null space.
    pub nullity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ResolventOutcome {
    Solved(ResolventSolution),
    Singular(SingularReport),
}

impl ResolventOutcome {
    pub fn solution(&self) -> Option<&ResolventSolution> {
        match self {
            ResolventOutcome::Solved(s) => Some(s),
            ResolventOutcome::Singular(_) => None,
        }
    }

    pub fn singular(&self) -> Option<&SingularReport> {
        match self {
            ResolventOutcome::Solved(_) => None,
            ResolventOutcome::Singular(r) => Some(r),
        }
    }

    pub fn is_singular(&self) -> bool {
        matches!(self, ResolventOutcome::Singular(_))
    }
}

/// Defect norms of the three resolvent identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityReport {
    /// ‖Γz − (h − α(I−P)z)‖
    pub basic_identity: f64,
    /// ‖(Lu − h) + (I−P)y‖
    pub error_form: f64,
    /// ‖P(Lu − h)‖
    pub constraint: f64,
}

impl IdentityReport {
    pub fn max_defect(&self) -> f64 {
        self.basic_identity.max(self.error_form).max(self.constraint)
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

/// (I − P) x
pub(crate) fn complement(p: &DMatrix<f64>, x: &DVector<f64>) -> DVector<f64> {
    x - p * x
}

/// T_α = α(I − P) + Γ with P the problem's constraint map.
pub fn assemble_t(alpha: f64, problem: &ProblemInstance) -> Result<DenseOperator> {
    check_alpha(alpha)?;
    Ok(DenseOperator::from_matrix_unchecked(assemble(alpha, problem.constraint_map().as_matrix(), problem.gamma().as_matrix())))
}

pub(crate) fn assemble(alpha: f64, p: &DMatrix<f64>, gamma: &DMatrix<f64>) -> DMatrix<f64> {
    let n = p.nrows();
    (DMatrix::identity(n, n) - p) * alpha + gamma
}

/// Solves T_α z = h and builds the canonical control and its residuals,
/// or reports a kernel witness when T_α is numerically singular.
pub fn solve_resolvent(alpha: f64, problem: &ProblemInstance) -> Result<ResolventOutcome> {
    solve_with_constraint(alpha, problem, problem.constraint_map().as_matrix(), problem.constraint_is_projector())
}

/// Same as [`solve_resolvent`] with `p` standing in for the problem's
/// constraint map. Used by Galerkin sweeps, which swap in π_n.
pub(crate) fn solve_with_constraint(
    alpha: f64,
    problem: &ProblemInstance,
    p: &DMatrix<f64>,
    symmetric: bool,
) -> Result<ResolventOutcome> {
    check_alpha(alpha)?;
    let gamma = problem.gamma().as_matrix();
    let h = problem.h().as_dvector();
    let t = assemble(alpha, p, gamma);
    let singular_tol = problem.tolerances().singular;

    let z = if symmetric {
        let (values, vectors) = sym_eigen(&t);
        let smax = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let threshold = singular_tol * smax;
        let kernel: Vec<usize> = (0..values.len()).filter(|&i| values[i].abs() <= threshold).collect();
        if smax == 0.0 || !kernel.is_empty() {
            let smallest = (0..values.len())
                .min_by(|&a, &b| values[a].abs().total_cmp(&values[b].abs()))
                .map(|i| values[i])
                .unwrap_or(0.0);
            let basis = DMatrix::from_fn(t.nrows(), kernel.len(), |r, c| vectors[(r, kernel[c])]);
            return Ok(ResolventOutcome::Singular(singular_report(alpha, &basis, h, smallest)));
        }
        match t.clone().cholesky() {
            Some(chol) => refine(|r| chol.solve(r), alpha, p, gamma, h),
            None => {
                let lu = t.lu();
                refine(|r| lu.solve(r).expect("nonsingular by spectral check"), alpha, p, gamma, h)
            }
        }
    } else {
        let (s, v) = right_singular_basis(&t);
        let smax = s.first().copied().unwrap_or(0.0);
        let smin = s.last().copied().unwrap_or(0.0);
        if smax == 0.0 || smin <= singular_tol * smax {
            let rank = s.iter().filter(|&&x| x > singular_tol * smax).count();
            let basis = v.columns(rank, v.ncols() - rank).into_owned();
            return Ok(ResolventOutcome::Singular(singular_report(alpha, &basis, h, smin)));
        }
        let lu = t.lu();
        refine(|r| lu.solve(r).expect("nonsingular by singular-value check"), alpha, p, gamma, h)
    };

    // z can be as large as ‖h‖/α; all products with it are compensated so
    // that L u and y stay accurate to working precision.
    let l_u = matvec_split(gamma, &z);
    let u = problem.l().map(|l| matvec_split(&l.as_matrix().transpose(), &z));
    let y = z.scaled(alpha);
    let residual = &l_u - h;
    let constraint_residual = p * &residual;
    let wrap = CoordinateVector::from_dvector_unchecked;
    Ok(ResolventOutcome::Solved(ResolventSolution {
        alpha,
        z: wrap(z.hi),
        z_tail: wrap(z.lo),
        u: u.map(wrap),
        l_u: wrap(l_u),
        y: wrap(y),
        residual: wrap(residual),
        constraint_residual: wrap(constraint_residual),
    }))
}

/// h − T_α z evaluated from Γ and P directly (never from an assembled
/// T_α), with compensated sums.
fn resolvent_residual(alpha: f64, p: &DMatrix<f64>, gamma: &DMatrix<f64>, h: &DVector<f64>, z: &SplitVector) -> DVector<f64> {
    let n = h.len();
    let alpha_p = p * alpha;
    DVector::from_fn(n, |i, _| {
        let mut acc = Compensated::default();
        acc.add(h[i]);
        acc.add_product(-alpha, z.hi[i]);
        acc.add_product(-alpha, z.lo[i]);
        for j in 0..n {
            let (g, ap) = (gamma[(i, j)], alpha_p[(i, j)]);
            acc.add_product(-g, z.hi[j]);
            acc.add_product(-g, z.lo[j]);
            acc.add_product(ap, z.hi[j]);
            acc.add_product(ap, z.lo[j]);
        }
        acc.value()
    })
}

/// Mixed-precision iterative refinement: residuals in doubled precision,
/// corrections from the working-precision factorization.
fn refine(
    solve: impl Fn(&DVector<f64>) -> DVector<f64>,
    alpha: f64,
    p: &DMatrix<f64>,
    gamma: &DMatrix<f64>,
    h: &DVector<f64>,
) -> SplitVector {
    let mut z = SplitVector::new(solve(h));
    for _ in 0..MAX_REFINEMENT_STEPS {
        let delta = solve(&resolvent_residual(alpha, p, gamma, h, &z));
        z.add_assign(&delta);
        if delta.norm() <= f64::EPSILON * f64::EPSILON * z.hi.norm() {
            break;
        }
    }
    z
}

/// Picks the kernel direction along which h is obstructed (the projection
/// of h onto the null space) when there is one, otherwise the first basis
/// vector. Sign is fixed so the largest entry is positive.
fn singular_report(alpha: f64, kernel: &DMatrix<f64>, h: &DVector<f64>, smallest: f64) -> SingularReport {
    let n = kernel.nrows();
    let mut k = if kernel.ncols() == 0 {
        DVector::zeros(n)
    } else {
        let coeffs = kernel.transpose() * h;
        if coeffs.norm() > 1e-12 * h.norm().max(f64::MIN_POSITIVE) && h.norm() > 0.0 {
            let k = kernel * coeffs;
            let norm = k.norm();
            k / norm
        } else {
            kernel.column(0).into_owned()
        }
    };
    if n > 0 && k[k.iamax()] < 0.0 {
        k.neg_mut();
    }
    SingularReport {
        alpha,
        kernel_vector: CoordinateVector::from_dvector_unchecked(k),
        smallest_eigenvalue: smallest,
        nullity: kernel.ncols(),
    }
}

pub fn identity_residuals(sol: &ResolventSolution, problem: &ProblemInstance) -> IdentityReport {
    let p = problem.constraint_map().as_matrix();
    let gamma = problem.gamma().as_matrix();
    let h = problem.h().as_dvector();
    let z = SplitVector {
        hi: sol.z.as_dvector().clone(),
        lo: sol.z_tail.as_dvector().clone(),
    };
    let basic = resolvent_residual(sol.alpha, p, gamma, h, &z);
    let error_form = sol.residual.as_dvector() + complement(p, sol.y.as_dvector());
    let constraint = p * (sol.l_u.as_dvector() - h);
    IdentityReport {
        basic_identity: basic.norm(),
        error_form: error_form.norm(),
        constraint: constraint.norm(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{make_problem, make_projector, Constraint, ProblemData};
    use crate::tolerances::Tolerances;

    fn v(c: &[f64]) -> CoordinateVector {
        CoordinateVector::new(c.to_vec()).unwrap()
    }

    fn axes(dim: usize, idx: &[usize]) -> Constraint {
        let vs: Vec<_> = idx.iter().map(|&i| CoordinateVector::unit(dim, i)).collect();
        Constraint::Projector(make_projector(dim, &vs, 1e-10, false).unwrap())
    }

    fn problem(l: Option<DenseOperator>, gamma: Option<DenseOperator>, c: Constraint, h: &[f64]) -> ProblemInstance {
        make_problem(ProblemData {
            l,
            gamma,
            constraint: c,
            h: v(h),
            dim_u: None,
            tolerances: Tolerances::default(),
        })
        .unwrap()
    }

    fn diagonal_solvable() -> ProblemInstance {
        problem(Some(DenseOperator::identity(2)), None, axes(2, &[0]), &[1.0, 1.0])
    }

    fn nilpotent() -> Constraint {
        Constraint::Raw(DenseOperator::from_row_major(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap())
    }

    #[test]
    fn assemble_examples() {
        let t = assemble_t(1.0, &diagonal_solvable()).unwrap();
        assert_eq!(t, DenseOperator::diagonal(&[1.0, 2.0]).unwrap());

        let p = problem(Some(DenseOperator::identity(2)), None, nilpotent(), &[0.0, 1.0]);
        let t = assemble_t(1.0, &p).unwrap();
        assert_eq!(t, DenseOperator::from_row_major(2, 2, &[2.0, -1.0, 0.0, 2.0]).unwrap());

        let l = DenseOperator::from_row_major(3, 1, &[1.0, 0.0, 0.0]).unwrap();
        let p = problem(Some(l), None, axes(3, &[1, 2]), &[0.0, 1.0, 0.0]);
        let t = assemble_t(0.5, &p).unwrap();
        assert!((t.as_matrix() - DenseOperator::diagonal(&[1.5, 0.0, 0.0]).unwrap().as_matrix()).norm() < 1e-15);

        assert_eq!(assemble_t(0.0, &p), Err(Error::InvalidAlpha(0.0)));
        assert!(assemble_t(f64::NAN, &p).is_err());
    }

    #[test]
    fn diagonal_solve_by_hand() {
        let p = diagonal_solvable();
        let sol = solve_resolvent(1.0, &p).unwrap().solution().cloned().unwrap();
        let close = |a: &CoordinateVector, b: &[f64]| (a.as_dvector() - DVector::from_row_slice(b)).norm() < 1e-15;
        assert!(close(&sol.z, &[1.0, 0.5]));
        assert!(close(&sol.l_u, &[1.0, 0.5]));
        assert!(close(&sol.y, &[1.0, 0.5]));
        assert!(close(sol.u.as_ref().unwrap(), &[1.0, 0.5]));
        assert!(sol.constraint_residual.norm() < 1e-15);
        let ids = identity_residuals(&sol, &p);
        assert!(ids.max_defect() < 1e-12, "{ids:?}");
    }

    #[test]
    fn truncated_shift_is_singular_with_kernel_e2() {
        let l = DenseOperator::from_row_major(3, 1, &[1.0, 0.0, 0.0]).unwrap();
        let p = problem(Some(l), None, axes(3, &[1, 2]), &[0.0, 1.0, 0.0]);
        for alpha in [1.0, 0.5, 1e-3] {
            let out = solve_resolvent(alpha, &p).unwrap();
            let rep = out.singular().expect("singular");
            assert!((rep.kernel_vector.as_dvector() - CoordinateVector::unit(3, 1).as_dvector()).norm() < 1e-12);
            assert_eq!(rep.nullity, 2);
            let t = assemble_t(alpha, &p).unwrap();
            assert!((t.as_matrix() * rep.kernel_vector.as_dvector()).norm() <= 1e-12 * t.frobenius_norm());
        }
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let p = problem(Some(DenseOperator::identity(2)), None, axes(2, &[0]), &[0.0, 0.0]);
        let sol = solve_resolvent(1.0, &p).unwrap().solution().cloned().unwrap();
        assert_eq!(sol.z.norm(), 0.0);
        assert_eq!(sol.residual.norm(), 0.0);
        assert_eq!(identity_residuals(&sol, &p).max_defect(), 0.0);
    }

    #[test]
    fn nilpotent_constraint_identity_fails() {
        let p = problem(Some(DenseOperator::identity(2)), None, nilpotent(), &[0.0, 1.0]);
        let alpha = 0.1;
        let sol = solve_resolvent(alpha, &p).unwrap().solution().cloned().unwrap();
        // z = (α/(1+α)², 1/(1+α)) from the explicit 2x2 inverse.
        let z = [alpha / (1.0 + alpha).powi(2), 1.0 / (1.0 + alpha)];
        assert!((sol.z.as_dvector() - DVector::from_row_slice(&z)).norm() < 1e-15);
        let ids = identity_residuals(&sol, &p);
        assert!((ids.constraint - (1.0 - 1.0 / 1.1)).abs() < 1e-12);
        assert!(ids.basic_identity < 1e-15);
    }

    #[test]
    fn control_omitted_without_l() {
        let p = problem(None, Some(DenseOperator::diagonal(&[1.0, 1.0, 0.0]).unwrap()), axes(3, &[0]), &[1.0, 1.0, 0.0]);
        let sol = solve_resolvent(0.5, &p).unwrap().solution().cloned().unwrap();
        assert!(sol.u.is_none());
        assert!((sol.l_u.as_dvector() - p.gamma().as_matrix() * sol.z.as_dvector()).norm() < 1e-15);
    }
}
