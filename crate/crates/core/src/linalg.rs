//! Dense rank-revealing helpers built on the singular value decomposition.
//!
//! Every rank decision in the crate goes through [`RankPolicy`]: a singular
//! value counts as zero when `sigma <= tol * sigma_max`. Null spaces are read
//! off a complete right singular basis. The factorizations come from `faer`.

use faer::{Mat, MatRef};
use nalgebra::{DMatrix, DVector};

use crate::scalar::Scalar;

/// Relative singular-value cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankPolicy<T: Scalar = f64> {
    pub tol: T,
}

impl<T: Scalar> Default for RankPolicy<T> {
    fn default() -> Self {
        Self { tol: T::default_tolerance() }
    }
}

impl<T: Scalar> RankPolicy<T> {
    pub fn new(tol: T) -> Self {
        Self { tol }
    }

    pub fn cutoff(&self, sigma_max: T) -> T {
        self.tol * sigma_max
    }
}

/// Thin SVD `a = u diag(sigma) v^T` with `k = min(rows, cols)` triplets,
/// sorted by decreasing singular value.
#[derive(Debug, Clone)]
pub struct ThinSvd<T: Scalar> {
    pub sigma: Vec<T>,
    pub u: DMatrix<T>,
    pub v: DMatrix<T>,
}

impl<T: Scalar> ThinSvd<T> {
    pub fn new(a: &DMatrix<T>) -> Self {
        let (m, n) = a.shape();
        if m == 0 || n == 0 {
            return Self { sigma: Vec::new(), u: DMatrix::zeros(m, 0), v: DMatrix::zeros(n, 0) };
        }
        let svd = to_faer(a).thin_svd().expect("svd converges");
        let s = svd.S().column_vector();
        Self { sigma: (0..s.nrows()).map(|i| s[i]).collect(), u: from_faer(svd.U()), v: from_faer(svd.V()) }
    }

    pub fn sigma_max(&self) -> T {
        self.sigma.first().copied().unwrap_or_else(T::zero)
    }

    /// Number of singular values strictly above the absolute `cutoff`.
    pub fn rank_above(&self, cutoff: T) -> usize {
        if self.sigma_max() <= T::zero() {
            return 0;
        }
        self.sigma.iter().filter(|&&s| s > cutoff).count()
    }
}

/// Singular triplets with a complete right singular basis.
#[derive(Debug, Clone)]
pub struct FullSvd<T: Scalar> {
    /// Singular values in decreasing order, `min(rows, cols)` of them for a
    /// tall matrix and `cols` (zero padded) for a wide one.
    pub sigma: Vec<T>,
    /// Left singular vectors matching the leading `min(rows, cols)` entries.
    pub u: DMatrix<T>,
    /// `cols x cols` orthogonal matrix; column `j` pairs with `sigma[j]`.
    pub v: DMatrix<T>,
}

impl<T: Scalar> FullSvd<T> {
    pub fn new(a: &DMatrix<T>) -> Self {
        let (m, n) = a.shape();
        if m == 0 || n == 0 {
            return Self { sigma: Vec::new(), u: DMatrix::zeros(m, 0), v: DMatrix::identity(n, n) };
        }
        // A tall matrix already has a square right factor in its thin SVD.
        let fa = to_faer(a);
        let svd = if m >= n { fa.thin_svd() } else { fa.svd() }.expect("svd converges");
        let s = svd.S().column_vector();
        let k = s.nrows();
        let mut sigma: Vec<T> = (0..k).map(|i| s[i]).collect();
        sigma.resize(n, T::zero());
        let u = from_faer(svd.U().subcols(0, k));
        Self { sigma, u, v: from_faer(svd.V()) }
    }

    pub fn sigma_max(&self) -> T {
        self.sigma.first().copied().unwrap_or_else(T::zero)
    }

    /// Number of singular values strictly above the absolute `cutoff`.
    pub fn rank_above(&self, cutoff: T) -> usize {
        if self.sigma_max() <= T::zero() {
            return 0;
        }
        self.sigma.iter().filter(|&&s| s > cutoff).count()
    }
}

/// Singular values only, largest first.
pub fn singular_values<T: Scalar>(a: &DMatrix<T>) -> Vec<T> {
    if a.is_empty() {
        return Vec::new();
    }
    to_faer(a).singular_values().expect("svd converges")
}

fn to_faer<T: Scalar>(a: &DMatrix<T>) -> Mat<T> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer<T: Scalar>(a: MatRef<'_, T>) -> DMatrix<T> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

pub fn max_abs<T: Scalar>(a: &DMatrix<T>) -> T {
    a.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

pub fn spectral_norm<T: Scalar>(a: &DMatrix<T>) -> T {
    singular_values(a).first().copied().unwrap_or_else(T::zero)
}

/// Numerical rank with a relative cutoff.
pub fn rank<T: Scalar>(a: &DMatrix<T>, policy: RankPolicy<T>) -> usize {
    let s = singular_values(a);
    match s.first() {
        Some(&smax) if smax > T::zero() => s.iter().filter(|&&x| x > policy.cutoff(smax)).count(),
        _ => 0,
    }
}

/// Orthonormal basis (as columns) of `ker a`, using a relative cutoff.
///
/// An exactly zero matrix yields the standard basis.
pub fn null_space<T: Scalar>(a: &DMatrix<T>, policy: RankPolicy<T>) -> DMatrix<T> {
    let n = a.ncols();
    if a.nrows() == 0 || max_abs(a) == T::zero() {
        return DMatrix::identity(n, n);
    }
    let svd = FullSvd::new(a);
    let r = svd.rank_above(policy.cutoff(svd.sigma_max()));
    svd.v.columns(r, n - r).into_owned()
}

/// Orthonormal basis of `ker a` where singular values `<= cutoff` are zero.
pub fn null_space_abs<T: Scalar>(a: &DMatrix<T>, cutoff: T) -> DMatrix<T> {
    let n = a.ncols();
    if a.nrows() == 0 || max_abs(a) == T::zero() {
        return DMatrix::identity(n, n);
    }
    let svd = FullSvd::new(a);
    let r = svd.rank_above(cutoff);
    svd.v.columns(r, n - r).into_owned()
}

/// Orthonormal basis of the column space of `a`.
pub fn range_basis<T: Scalar>(a: &DMatrix<T>, policy: RankPolicy<T>) -> DMatrix<T> {
    let m = a.nrows();
    if a.ncols() == 0 || m == 0 || max_abs(a) == T::zero() {
        return DMatrix::zeros(m, 0);
    }
    let svd = ThinSvd::new(a);
    let r = svd.rank_above(policy.cutoff(svd.sigma_max()));
    svd.u.columns(0, r).into_owned()
}

/// Moore-Penrose pseudoinverse with a relative cutoff.
pub fn pinv<T: Scalar>(a: &DMatrix<T>, policy: RankPolicy<T>) -> DMatrix<T> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 || max_abs(a) == T::zero() {
        return DMatrix::zeros(n, m);
    }
    let svd = ThinSvd::new(a);
    let r = svd.rank_above(policy.cutoff(svd.sigma_max()));
    let mut vs = svd.v.columns(0, r).into_owned();
    for j in 0..r {
        let s_inv = T::one() / svd.sigma[j];
        vs.column_mut(j).scale_mut(s_inv);
    }
    vs * svd.u.columns(0, r).transpose()
}

/// Minimum-norm least-squares solution of `a x = b`.
pub fn lstsq<T: Scalar>(a: &DMatrix<T>, b: &DVector<T>, policy: RankPolicy<T>) -> DVector<T> {
    pinv(a, policy) * b
}

/// Orthonormal basis for `span(a) ∩ span(b)^⊥`, where `a` has orthonormal
/// columns. Returned in the coordinates of the ambient space.
pub fn complement_within<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>, policy: RankPolicy<T>) -> DMatrix<T> {
    if b.ncols() == 0 || a.ncols() == 0 {
        return a.clone();
    }
    let proj = b.transpose() * a;
    let coords = null_space_abs(&proj, policy.tol.max(T::default_epsilon()));
    a * coords
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_wide_matrix_is_complete() {
        let a = DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0]);
        let k = null_space(&a, RankPolicy::default());
        assert_eq!(k.ncols(), 2);
        assert!(max_abs(&(&a * &k)) < 1e-14);
        let gram = k.transpose() * &k;
        assert!(max_abs(&(gram - DMatrix::identity(2, 2))) < 1e-14);
    }

    #[test]
    fn zero_matrix_gives_standard_basis() {
        let a = DMatrix::<f64>::zeros(3, 4);
        assert_eq!(null_space(&a, RankPolicy::default()), DMatrix::identity(4, 4));
        let empty = DMatrix::<f64>::zeros(0, 3);
        assert_eq!(null_space(&empty, RankPolicy::default()), DMatrix::identity(3, 3));
        assert_eq!(rank(&empty, RankPolicy::default()), 0);
    }

    #[test]
    fn tall_and_wide_factorizations_agree() {
        let a = DMatrix::from_fn(9, 3, |i, j| ((i * 3 + j) as f64).sin());
        let t = ThinSvd::new(&a);
        let rebuilt = &t.u * DMatrix::from_diagonal(&DVector::from_vec(t.sigma.clone())) * t.v.transpose();
        assert!(max_abs(&(rebuilt - &a)) < 1e-13);
        let w = FullSvd::new(&a.transpose());
        assert_eq!(w.v.shape(), (9, 9));
        assert!(max_abs(&(w.v.transpose() * &w.v - DMatrix::identity(9, 9))) < 1e-13);
        assert!((singular_values(&a)[0] - t.sigma[0]).abs() < 1e-13);
    }

    #[test]
    fn pinv_inverts_full_column_rank() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 0.0, 1.0, 1.0, 1.0]);
        let p = pinv(&a, RankPolicy::default());
        assert!(max_abs(&(&p * &a - DMatrix::identity(2, 2))) < 1e-13);
    }

    #[test]
    fn rank_respects_relative_cutoff() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1e-6, 1e-12]));
        assert_eq!(rank(&a, RankPolicy::new(1e-9)), 2);
        assert_eq!(rank(&a, RankPolicy::new(1e-3)), 1);
    }

    #[test]
    fn range_and_null_space_are_complementary() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 1.0, 1.0]);
        let r = range_basis(&a, RankPolicy::default());
        let k = null_space(&a, RankPolicy::default());
        assert_eq!(r.ncols() + k.ncols(), 3);
    }
}
