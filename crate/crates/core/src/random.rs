//! Seeded random problem instances for property tests and benchmarks.
//!
//! L is built as U·diag(s)·Vᵀ with orthonormal U, V and singular values in
//! [0.5, 2], so Γ = L Lᵀ has its nonzero spectrum in [0.25, 4]. The
//! constraint range is drawn near Range(L) and resampled until it meets
//! Ker(Γ) at a healthy angle, which keeps T_α invertible for all α > 0.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hilbert::{make_problem, make_projector, Constraint, CoordinateVector, DenseOperator, ProblemData, ProblemInstance};
use crate::linalg::singular_values;
use crate::tolerances::Tolerances;

/// Minimum singular value of Uᵀ Q_π accepted for the constraint range.
const MIN_RANGE_ANGLE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaKind {
    /// Alternate between full-rank and rank-deficient L.
    Mixed,
    FullRank,
    /// Γ with smallest eigenvalue at least 0.25 (requires dimU ≥ dimH).
    StrictlyPositive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomConfig {
    pub max_dim_h: usize,
    pub max_dim_u: usize,
    pub max_constraint_rank: usize,
    pub gamma: GammaKind,
}

impl Default for RandomConfig {
    fn default() -> Self {
        Self {
            max_dim_h: 8,
            max_dim_u: 8,
            max_constraint_rank: 3,
            gamma: GammaKind::Mixed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub seed: u64,
    pub problem: ProblemInstance,
    /// h was drawn inside Range(L).
    pub h_in_range: bool,
    pub gamma_rank: usize,
}

pub fn random_vector(rng: &mut impl Rng, dim: usize) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0))
}

fn random_orthonormal(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    loop {
        let qr = DMatrix::<f64>::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0)).qr();
        let r = qr.r();
        if (0..cols).all(|i| r[(i, i)].abs() > 1e-3) {
            return qr.q();
        }
    }
}

pub fn random_instance(seed: u64, config: &RandomConfig) -> RandomInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim_h = rng.random_range(2..=config.max_dim_h.max(2));
    let dim_u = match config.gamma {
        GammaKind::StrictlyPositive => rng.random_range(dim_h..=config.max_dim_u.max(dim_h)),
        _ => rng.random_range(1..=config.max_dim_u.max(1)),
    };
    let full = dim_h.min(dim_u);
    let rank = match config.gamma {
        GammaKind::FullRank | GammaKind::StrictlyPositive => full,
        GammaKind::Mixed if seed.is_multiple_of(2) => full,
        GammaKind::Mixed => rng.random_range(1..=full.min(dim_h - 1)),
    };

    let u = random_orthonormal(&mut rng, dim_h, rank);
    let v = random_orthonormal(&mut rng, dim_u, rank);
    let s = DVector::from_fn(rank, |_, _| rng.random_range(0.5..2.0));
    let l = &u * DMatrix::from_diagonal(&s) * v.transpose();

    let k = rng.random_range(0..=config.max_constraint_rank.min(rank));
    let constraint = loop {
        let basis: Vec<CoordinateVector> = (0..k)
            .map(|_| {
                let inside = &u * random_vector(&mut rng, rank);
                let noise = random_vector(&mut rng, dim_h) * 0.5;
                CoordinateVector::from_dvector_unchecked(inside + noise)
            })
            .collect();
        let p = make_projector(dim_h, &basis, Tolerances::default().ortho, false).expect("finite basis");
        let angle = singular_values(&(u.transpose() * p.basis().as_matrix())).last().copied();
        if p.rank() == k && angle.is_none_or(|a| a >= MIN_RANGE_ANGLE) {
            break p;
        }
    };

    let h_in_range = rank == dim_h || rng.random_bool(0.5);
    let h = if h_in_range {
        &l * random_vector(&mut rng, dim_u)
    } else {
        loop {
            let h = random_vector(&mut rng, dim_h);
            let outside = &h - &u * (u.transpose() * &h);
            if outside.norm() >= 0.2 * h.norm() {
                break h;
            }
        }
    };

    let problem = make_problem(ProblemData {
        l: Some(DenseOperator::from_matrix_unchecked(l)),
        gamma: None,
        constraint: Constraint::Projector(constraint),
        h: CoordinateVector::from_dvector_unchecked(h),
        dim_u: None,
        tolerances: Tolerances::default(),
    })
    .expect("random instance is consistent by construction");

    RandomInstance {
        seed,
        problem,
        h_in_range,
        gamma_rank: rank,
    }
}
