//! Dense kernels shared by the analysis modules. Storage and the LU /
//! Cholesky solves are nalgebra; the spectral factorizations (SVD and
//! symmetric eigen) come from faer, which stays accurate on the
//! rank-deficient matrices the oracle and singular checks live on.

use faer::{Mat, MatRef, Side};
use nalgebra::{DMatrix, DVector};

/// Default relative singular-value cutoff for rank decisions.
pub const RANK_TOL: f64 = 1e-10;

fn to_faer(m: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: MatRef<'_, f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| *m.get(i, j))
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues ascending.
pub(crate) fn sym_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (DVector::zeros(0), DMatrix::zeros(0, 0));
    }
    let eig = to_faer(&symmetrize(m))
        .self_adjoint_eigen(Side::Lower)
        .expect("symmetric eigensolver converges on finite input");
    let values = DVector::from_iterator(n, eig.S().column_vector().iter().copied());
    (values, from_faer(eig.U()))
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Full SVD: singular values (descending, length min(rows, cols)),
/// U (rows x rows), V (cols x cols).
fn svd(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>, DMatrix<f64>) {
    let f = to_faer(m).svd().expect("SVD converges on finite input");
    let s = f.S().column_vector().iter().copied().collect();
    (s, from_faer(f.U()), from_faer(f.V()))
}

/// Singular values in descending order.
pub(crate) fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    to_faer(m).singular_values().expect("SVD converges on finite input")
}

pub(crate) fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&smax) if smax > 0.0 => s.iter().filter(|&&v| v > rel_tol * smax).count(),
        _ => 0,
    }
}

/// Full right singular basis of `m`: returns (singular values padded with
/// zeros to `cols`, descending; V with orthonormal columns, cols x cols).
pub(crate) fn right_singular_basis(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let cols = m.ncols();
    if cols == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    if m.nrows() == 0 {
        return (vec![0.0; cols], DMatrix::identity(cols, cols));
    }
    let (mut s, _, v) = svd(m);
    s.resize(cols, 0.0);
    (s, v)
}

/// Orthonormal basis of the numerical null space of `m`.
pub(crate) fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let (s, v) = right_singular_basis(m);
    let smax = s.first().copied().unwrap_or(0.0);
    let rank = if smax > 0.0 {
        s.iter().filter(|&&x| x > rel_tol * smax).count()
    } else {
        0
    };
    v.columns(rank, v.ncols() - rank).into_owned()
}

/// Minimum-norm least-squares solution of `a x ≈ b` by truncated SVD.
pub(crate) fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>, rel_tol: f64) -> DVector<f64> {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return DVector::zeros(cols);
    }
    let (s, u, v) = svd(a);
    let smax = s.first().copied().unwrap_or(0.0);
    let mut x = DVector::zeros(cols);
    for (i, &sigma) in s.iter().enumerate() {
        if smax > 0.0 && sigma > rel_tol * smax {
            x += v.column(i) * (u.column(i).dot(b) / sigma);
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_wide_matrix_is_complete() {
        // 1x3 row (1, 1, 0): kernel is two-dimensional.
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let n = null_space(&m, RANK_TOL);
        assert_eq!(n.ncols(), 2);
        assert!((&m * &n).norm() < 1e-14);
        assert!((n.transpose() * &n - DMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn lstsq_matches_normal_equations_on_full_rank() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 0.0, 2.0]);
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let x = lstsq(&a, &b, RANK_TOL);
        let ata = a.transpose() * &a;
        let expected = ata.lu().solve(&(a.transpose() * &b)).unwrap();
        assert!((x - expected).norm() < 1e-12);
    }

    #[test]
    fn eigenvalues_come_back_ascending() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -1.0, 2.0]));
        let (vals, vecs) = sym_eigen(&m);
        assert_eq!(vals.as_slice(), &[-1.0, 2.0, 3.0]);
        assert!((vecs.column(0).abs() - DVector::from_vec(vec![0.0, 1.0, 0.0])).norm() < 1e-14);
    }
}

/// Error-free transformation a + b = s + e.
#[inline]
pub(crate) fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Veltkamp split of a into two 26-bit halves, a = hi + lo exactly.
#[inline]
fn split(a: f64) -> (f64, f64) {
    const FACTOR: f64 = 134_217_729.0; // 2^27 + 1
    let c = FACTOR * a;
    let hi = c - (c - a);
    (hi, a - hi)
}

/// Error-free transformation a·b = p + e (Dekker). Avoids `mul_add`, which
/// is a slow library call on targets built without hardware FMA.
#[inline]
pub(crate) fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, al * bl - (((p - ah * bh) - al * bh) - ah * bl))
}

/// Dot2-style accumulator: the result is as accurate as if computed in
/// twice the working precision, then rounded.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Compensated {
    sum: f64,
    err: f64,
}

impl Compensated {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.sum, x);
        self.sum = s;
        self.err += e;
    }

    #[inline]
    pub(crate) fn add_product(&mut self, a: f64, b: f64) {
        let (p, e) = two_prod(a, b);
        self.add(p);
        self.err += e;
    }

    pub(crate) fn value(self) -> f64 {
        self.sum + self.err
    }
}

/// A vector held as an unevaluated sum hi + lo.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SplitVector {
    pub hi: DVector<f64>,
    pub lo: DVector<f64>,
}

impl SplitVector {
    pub(crate) fn new(hi: DVector<f64>) -> Self {
        let lo = DVector::zeros(hi.len());
        Self { hi, lo }
    }

    pub(crate) fn add_assign(&mut self, delta: &DVector<f64>) {
        for i in 0..self.hi.len() {
            let (s, e) = two_sum(self.hi[i], delta[i]);
            let (hi, lo) = two_sum(s, e + self.lo[i]);
            self.hi[i] = hi;
            self.lo[i] = lo;
        }
    }

    /// α·(hi + lo), compensated.
    pub(crate) fn scaled(&self, alpha: f64) -> DVector<f64> {
        DVector::from_fn(self.hi.len(), |i, _| {
            let mut acc = Compensated::default();
            acc.add_product(alpha, self.hi[i]);
            acc.add_product(alpha, self.lo[i]);
            acc.value()
        })
    }
}

/// a·(hi + lo) with compensated row sums.
pub(crate) fn matvec_split(a: &DMatrix<f64>, x: &SplitVector) -> DVector<f64> {
    DVector::from_fn(a.nrows(), |i, _| {
        let mut acc = Compensated::default();
        for j in 0..a.ncols() {
            acc.add_product(a[(i, j)], x.hi[j]);
            acc.add_product(a[(i, j)], x.lo[j]);
        }
        acc.value()
    })
}

#[cfg(test)]
mod compensated_tests {
    use super::*;

    #[test]
    fn recovers_cancelled_sum() {
        // 1e16 + 1 - 1e16 is 0 in plain f64 arithmetic.
        let mut acc = Compensated::default();
        acc.add(1e16);
        acc.add(1.0);
        acc.add(-1e16);
        assert_eq!(acc.value(), 1.0);
        assert_eq!(1e16 + 1.0 - 1e16, 0.0);
    }

    #[test]
    fn split_vector_keeps_low_bits() {
        let mut z = SplitVector::new(DVector::from_element(1, 1.0));
        z.add_assign(&DVector::from_element(1, 1e-20));
        assert_eq!(z.hi[0], 1.0);
        assert_eq!(z.lo[0], 1e-20);
        assert_eq!(z.scaled(2.0)[0], 2.0);
    }
}
