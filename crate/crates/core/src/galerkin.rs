//! Nested finite-rank projector families π_n and the Galerkin sweep that
//! replaces the target constraint by π_n while α → 0⁺.
//!
//! Coordinates for function-space families are scaled samples
//! f(x_j)/√M on the uniform midpoint grid, so the Euclidean inner product
//! on coordinates is the midpoint-rule L²(0,1) inner product.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::hilbert::{orthonormalize, CoordinateVector, ProblemInstance, Projector};
use crate::resolvent::{complement, solve_with_constraint, ResolventOutcome};

/// Nested subspaces H_1 ⊂ H_2 ⊂ … ⊂ H_max_n. Level n is spanned by the
/// concatenation of the first n increments, so nesting holds by
/// construction; level 0 is the zero subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceFamily {
    description: String,
    dim: usize,
    increments: Vec<Vec<CoordinateVector>>,
}

impl SubspaceFamily {
    pub fn new(description: impl Into<String>, dim: usize, increments: Vec<Vec<CoordinateVector>>) -> Result<Self> {
        for v in increments.iter().flatten() {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    context: "subspace family vector",
                    expected: dim,
                    actual: v.dim(),
                });
            }
        }
        Ok(Self {
            description: description.into(),
            dim,
            increments,
        })
    }

    /// span{e₁}, span{e₁, e₂}, … in ℝ^dim.
    pub fn canonical(dim: usize, max_n: usize) -> Result<Self> {
        if max_n > dim {
            return Err(Error::LevelOutOfRange { level: max_n, max_n: dim });
        }
        let increments = (0..max_n).map(|i| vec![CoordinateVector::unit(dim, i)]).collect();
        Self::new(format!("canonical(dim={dim})"), dim, increments)
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_n(&self) -> usize {
        self.increments.len()
    }

    /// Number of basis vectors at level n.
    pub fn level_size(&self, n: usize) -> usize {
        self.increments[..n.min(self.max_n())].iter().map(Vec::len).sum()
    }

    pub fn level_basis(&self, n: usize) -> Result<Vec<&CoordinateVector>> {
        self.check_level(n)?;
        Ok(self.increments[..n].iter().flatten().collect())
    }

    fn check_level(&self, n: usize) -> Result<()> {
        if n > self.max_n() {
            Err(Error::LevelOutOfRange { level: n, max_n: self.max_n() })
        } else {
            Ok(())
        }
    }

    /// Orthonormal basis for level `n`, whose leading columns are the
    /// orthonormal bases of every lower level.
    fn nested_basis(&self, n: usize) -> Result<DMatrix<f64>> {
        let vectors: Vec<&DVector<f64>> = self.level_basis(n)?.into_iter().map(|v| v.as_dvector()).collect();
        let (q, kept) = orthonormalize(self.dim, &vectors);
        if kept.len() < vectors.len() {
            // First dropped index pins down the first defective level.
            let first_dropped = (0..vectors.len()).find(|i| !kept.contains(i)).unwrap_or(0);
            let level = (1..=n).find(|&m| self.level_size(m) > first_dropped).unwrap_or(n);
            return Err(Error::DependentLevel {
                level,
                rank: kept.iter().filter(|&&i| i < self.level_size(level)).count(),
                expected: self.level_size(level),
            });
        }
        Ok(q)
    }
}

/// {1, sin 2πx, …, sin 2πnx} sampled on M midpoints. max_n = ⌊(M − 2)/2⌋.
pub fn sine_family(grid: usize) -> Result<SubspaceFamily> {
    if grid < 4 {
        return Err(Error::InvalidParam {
            scenario: "sine_family".into(),
            message: format!("grid size must be at least 4, got {grid}"),
        });
    }
    let max_n = (grid - 2) / 2;
    let sample = |f: &dyn Fn(f64) -> f64| grid_function(grid, f);
    let mut increments = Vec::with_capacity(max_n);
    for k in 1..=max_n {
        let freq = 2.0 * PI * k as f64;
        let sine = sample(&|x| (freq * x).sin());
        if k == 1 {
            increments.push(vec![sample(&|_| 1.0), sine]);
        } else {
            increments.push(vec![sine]);
        }
    }
    SubspaceFamily::new(format!("sine(M={grid})"), grid, increments)
}

/// Midpoints x_j = (j + ½)/M.
pub fn grid_points(grid: usize) -> Vec<f64> {
    (0..grid).map(|j| (j as f64 + 0.5) / grid as f64).collect()
}

/// Coordinates f(x_j)/√M of a function on the midpoint grid.
pub fn grid_function(grid: usize, f: impl Fn(f64) -> f64) -> CoordinateVector {
    let scale = (grid as f64).sqrt().recip();
    CoordinateVector::from_dvector_unchecked(DVector::from_iterator(grid, grid_points(grid).into_iter().map(|x| f(x) * scale)))
}

pub fn family_projector(family: &SubspaceFamily, n: usize) -> Result<Projector> {
    Ok(Projector::from_orthonormal(family.nested_basis(n)?))
}

/// ‖π_n x − πx‖ for every probe x (rows) and level n = 1..=max_n (columns).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeTable {
    pub levels: Vec<usize>,
    pub defects: Vec<Vec<f64>>,
}

pub fn strong_convergence_probe(family: &SubspaceFamily, target: &Projector, probes: &[CoordinateVector]) -> Result<ProbeTable> {
    if target.dim() != family.dim() {
        return Err(Error::DimensionMismatch {
            context: "target projector vs family",
            expected: family.dim(),
            actual: target.dim(),
        });
    }
    let q = family.nested_basis(family.max_n())?;
    let levels: Vec<usize> = (1..=family.max_n()).collect();
    let mut defects = Vec::with_capacity(probes.len());
    for x in probes {
        if x.dim() != family.dim() {
            return Err(Error::DimensionMismatch {
                context: "probe vector",
                expected: family.dim(),
                actual: x.dim(),
            });
        }
        let target_image = target.map().as_matrix() * x.as_dvector();
        let coeffs = q.transpose() * x.as_dvector();
        let row = levels
            .iter()
            .map(|&n| {
                let k = family.level_size(n);
                let image = q.columns(0, k) * coeffs.rows(0, k);
                (image - &target_image).norm()
            })
            .collect();
        defects.push(row);
    }
    Ok(ProbeTable { levels, defects })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GalerkinRecord {
    pub step: usize,
    pub n: usize,
    pub alpha: f64,
    /// ‖L u_{α,n} − h‖
    pub norm_residual: f64,
    /// ‖π_n(L u_{α,n} − h)‖
    pub norm_constraint_residual_n: f64,
    /// ‖π(L u_{α,n} − h)‖ under the problem's own constraint.
    pub norm_constraint_residual_target: f64,
    /// ‖(I − π_n) α z_{α,n}‖
    pub norm_error_formula: f64,
    pub singular: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GalerkinReport {
    pub family: String,
    pub h_norm: f64,
    pub records: Vec<GalerkinRecord>,
}

impl GalerkinReport {
    /// For each level n, the nonsingular record with the smallest α: a
    /// proxy for the inner limit α → 0⁺ at fixed n.
    pub fn inner_limit_proxy(&self) -> Vec<&GalerkinRecord> {
        let mut levels: Vec<usize> = self.records.iter().map(|r| r.n).collect();
        levels.sort_unstable();
        levels.dedup();
        levels
            .into_iter()
            .filter_map(|n| {
                self.records
                    .iter()
                    .filter(|r| r.n == n && !r.singular)
                    .min_by(|a, b| a.alpha.total_cmp(&b.alpha))
            })
            .collect()
    }

    pub fn last(&self) -> Option<&GalerkinRecord> {
        self.records.last()
    }
}

/// Diagonal schedule (n_k, α_k) = (k, 10⁻ᵏ), k = 1..=count, capped at max_n.
pub fn diagonal_steps(count: usize, max_n: usize) -> Vec<(usize, f64)> {
    (1..=count.min(max_n)).map(|k| (k, 10f64.powi(-(k as i32)))).collect()
}

pub fn galerkin_sweep(problem: &ProblemInstance, family: &SubspaceFamily, steps: &[(usize, f64)]) -> Result<GalerkinReport> {
    galerkin_sweep_with(problem, family, steps, Execution::default())
}

pub fn galerkin_sweep_with(
    problem: &ProblemInstance,
    family: &SubspaceFamily,
    steps: &[(usize, f64)],
    exec: Execution,
) -> Result<GalerkinReport> {
    if steps.is_empty() {
        return Err(Error::EmptySteps);
    }
    if family.dim() != problem.dim_h() {
        return Err(Error::DimensionMismatch {
            context: "family vs problem",
            expected: problem.dim_h(),
            actual: family.dim(),
        });
    }
    let top = steps.iter().map(|s| s.0).max().unwrap_or(0);
    family.check_level(top)?;
    let q = family.nested_basis(top)?;

    let indexed: Vec<(usize, (usize, f64))> = steps.iter().copied().enumerate().collect();
    let h = problem.h().as_dvector();
    let target = problem.constraint_map().as_matrix();
    let records = exec
        .map(&indexed, |&(step, (n, alpha))| {
            let basis = q.columns(0, family.level_size(n));
            let p_n = basis * basis.transpose();
            let out = solve_with_constraint(alpha, problem, &p_n, true)?;
            Ok(match out {
                ResolventOutcome::Solved(sol) => {
                    let r = sol.residual.as_dvector();
                    GalerkinRecord {
                        step,
                        n,
                        alpha,
                        norm_residual: r.norm(),
                        norm_constraint_residual_n: sol.constraint_residual.norm(),
                        norm_constraint_residual_target: (target * r).norm(),
                        norm_error_formula: complement(&p_n, sol.y.as_dvector()).norm(),
                        singular: false,
                    }
                }
                ResolventOutcome::Singular(_) => GalerkinRecord {
                    step,
                    n,
                    alpha,
                    norm_residual: f64::NAN,
                    norm_constraint_residual_n: f64::NAN,
                    norm_constraint_residual_target: f64::NAN,
                    norm_error_formula: f64::NAN,
                    singular: true,
                },
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    Ok(GalerkinReport {
        family: family.description().to_string(),
        h_norm: h.norm(),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{make_problem, Constraint, DenseOperator, ProblemData};
    use crate::tolerances::Tolerances;

    #[test]
    fn canonical_level_two() {
        let f = SubspaceFamily::canonical(3, 2).unwrap();
        let p = family_projector(&f, 2).unwrap();
        assert_eq!(p.map(), &DenseOperator::diagonal(&[1.0, 1.0, 0.0]).unwrap());
        assert_eq!(family_projector(&f, 0).unwrap().rank(), 0);
        assert!(matches!(family_projector(&f, 3), Err(Error::LevelOutOfRange { level: 3, max_n: 2 })));
    }

    #[test]
    fn sine_family_levels() {
        let f = sine_family(8).unwrap();
        assert_eq!(f.max_n(), 3);
        assert_eq!(f.level_size(1), 2);
        let p = family_projector(&f, 1).unwrap();
        assert_eq!(p.rank(), 2);
        let q = p.basis().as_matrix();
        assert!((q.transpose() * q - DMatrix::identity(2, 2)).norm() < 1e-10);

        let one = grid_function(8, |_| 1.0);
        assert!((one.norm() - 1.0).abs() < 1e-15);

        let f4 = sine_family(4).unwrap();
        assert_eq!(f4.max_n(), 1);
        assert_eq!(family_projector(&f4, 1).unwrap().rank(), 2);
        assert!(matches!(family_projector(&f4, 2), Err(Error::LevelOutOfRange { .. })));
        assert!(sine_family(3).is_err());
    }

    #[test]
    fn raw_samples_are_discretely_orthogonal() {
        // Before any orthonormalization the sampled basis is already
        // orthogonal under the midpoint rule; constants and sines have
        // norms 1 and 1/√2.
        let f = sine_family(16).unwrap();
        let b = f.level_basis(f.max_n()).unwrap();
        for (i, u) in b.iter().enumerate() {
            for (j, w) in b.iter().enumerate() {
                let ip = u.dot(w.as_dvector());
                let expected = match (i, j) {
                    (0, 0) => 1.0,
                    _ if i == j => 0.5,
                    _ => 0.0,
                };
                assert!((ip - expected).abs() < 1e-12, "({i},{j}) = {ip}");
            }
        }
    }

    #[test]
    fn dependent_level_is_named() {
        let e1 = CoordinateVector::unit(3, 0);
        let f = SubspaceFamily::new("dup", 3, vec![vec![e1.clone()], vec![CoordinateVector::unit(3, 1)], vec![e1]]).unwrap();
        assert!(family_projector(&f, 2).is_ok());
        assert_eq!(
            family_projector(&f, 3),
            Err(Error::DependentLevel { level: 3, rank: 2, expected: 3 })
        );
    }

    #[test]
    fn probe_table_canonical() {
        let f = SubspaceFamily::canonical(3, 2).unwrap();
        let target = family_projector(&f, 2).unwrap();
        let probes = [CoordinateVector::unit(3, 1), CoordinateVector::unit(3, 2), CoordinateVector::unit(3, 0)];
        let t = strong_convergence_probe(&f, &target, &probes).unwrap();
        assert_eq!(t.levels, vec![1, 2]);
        assert_eq!(t.defects[0], vec![1.0, 0.0]);
        assert_eq!(t.defects[1], vec![0.0, 0.0]);
        assert_eq!(t.defects[2], vec![0.0, 0.0]);
        assert!(strong_convergence_probe(&f, &target, &[CoordinateVector::zeros(2)]).is_err());
    }

    fn identity_problem(h: &[f64]) -> ProblemInstance {
        let n = h.len();
        make_problem(ProblemData {
            l: Some(DenseOperator::identity(n)),
            gamma: None,
            constraint: Constraint::Projector(Projector::zero(n)),
            h: CoordinateVector::new(h.to_vec()).unwrap(),
            dim_u: None,
            tolerances: Tolerances::default(),
        })
        .unwrap()
    }

    #[test]
    fn identity_gamma_closed_form() {
        // Γ = I: (I − π_n)z = (I − π_n)h/(1+α) so ‖Lu − h‖ = α/(1+α)·‖(I − π_n)h‖.
        let p = identity_problem(&[1.0, 1.0, 1.0, 1.0]);
        let f = SubspaceFamily::canonical(4, 3).unwrap();
        let steps = [(1, 1e-1), (2, 1e-2), (3, 1e-3)];
        let rep = galerkin_sweep(&p, &f, &steps).unwrap();
        for r in &rep.records {
            let tail = ((4 - r.n) as f64).sqrt();
            let expected = r.alpha / (1.0 + r.alpha) * tail;
            assert!((r.norm_residual - expected).abs() < 1e-15, "{r:?}");
            assert!(r.norm_constraint_residual_n < 1e-15);
            assert!((r.norm_error_formula - r.norm_residual).abs() < 1e-15);
        }
        assert_eq!(rep.inner_limit_proxy().len(), 3);
    }

    #[test]
    fn zero_rhs_and_bad_steps() {
        let p = identity_problem(&[0.0; 4]);
        let f = SubspaceFamily::canonical(4, 3).unwrap();
        let rep = galerkin_sweep(&p, &f, &[(1, 0.1), (3, 0.01)]).unwrap();
        assert!(rep.records.iter().all(|r| r.norm_residual == 0.0 && r.norm_constraint_residual_n == 0.0));
        assert_eq!(galerkin_sweep(&p, &f, &[]), Err(Error::EmptySteps));
        assert!(galerkin_sweep(&p, &f, &[(4, 0.1)]).is_err());
        assert!(galerkin_sweep(&p, &f, &[(1, -1.0)]).is_err());
    }

    #[test]
    fn diagonal_schedule() {
        let s = diagonal_steps(8, 5);
        assert_eq!(s.len(), 5);
        assert_eq!(s[0], (1, 0.1));
        assert_eq!(s[4].0, 5);
    }
}
