//! Thin helpers over `faer` for the small dense matrices used here.

use faer::Mat;
use faer::linalg::solvers::{DenseSolveCore, Solve};

use crate::c64;
use crate::error::{Error, Result};

pub const ZERO: c64 = c64::new(0.0, 0.0);
pub const ONE: c64 = c64::new(1.0, 0.0);
pub const I: c64 = c64::new(0.0, 1.0);

#[inline]
pub fn re(x: f64) -> c64 {
    c64::new(x, 0.0)
}

/// Square matrix from row-major nested arrays.
pub fn from_rows<const N: usize>(rows: [[c64; N]; N]) -> Mat<c64> {
    Mat::from_fn(N, N, |i, j| rows[i][j])
}

pub fn identity(n: usize) -> Mat<c64> {
    Mat::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
}

/// Largest entrywise modulus of `a − b`.
pub fn max_abs_diff(a: &Mat<c64>, b: &Mat<c64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let d = (a[(i, j)] - b[(i, j)]).norm();
            // f64::max would silently drop NaN
            if d.is_nan() {
                return f64::NAN;
            }
            m = m.max(d);
        }
    }
    m
}

/// `‖A†A − I‖_max`.
pub fn unitarity_deviation(a: &Mat<c64>) -> f64 {
    let g = a.adjoint() * a;
    max_abs_diff(&g, &identity(a.nrows()))
}

pub fn matmul(a: &Mat<c64>, b: &Mat<c64>) -> Mat<c64> {
    a * b
}

/// `A⁻¹ B` through a fully pivoted LU; fails when `A` is numerically singular.
pub fn solve(a: &Mat<c64>, b: &Mat<c64>) -> Result<Mat<c64>> {
    let n = a.nrows();
    let lu = a.full_piv_lu();
    let x = lu.solve(b);
    // reject if the factorization lost the rank
    let resid = max_abs_diff(&(a * &x), b);
    let scale = 1.0 + max_norm(a) * max_norm(&x);
    // an enormous solution signals a rank-deficient pivot even when the residual is tiny
    let finite = (0..x.ncols()).all(|j| (0..x.nrows()).all(|i| x[(i, j)].is_finite()));
    let cond = if finite { max_norm(a) * max_norm(&x) } else { f64::INFINITY };
    if !resid.is_finite() || resid > 1e-10 * scale * n as f64 || !(cond < 1e13) {
        return Err(Error::SingularParameter("linear system is singular".into()));
    }
    Ok(x)
}

pub fn inverse(a: &Mat<c64>) -> Result<Mat<c64>> {
    let inv = a.full_piv_lu().inverse();
    let finite = (0..inv.ncols()).all(|j| (0..inv.nrows()).all(|i| inv[(i, j)].is_finite()));
    if finite && max_norm(a) * max_norm(&inv) < 1e13 {
        Ok(inv)
    } else {
        Err(Error::SingularParameter("matrix is singular".into()))
    }
}

pub fn max_norm(a: &Mat<c64>) -> f64 {
    a.as_ref().norm_max()
}

/// Matrix-vector product on plain slices.
pub fn apply(a: &Mat<c64>, v: &[c64]) -> Vec<c64> {
    assert_eq!(a.ncols(), v.len());
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * v[j]).sum())
        .collect()
}

/// Bilinear (unconjugated) product `Σ uᵢ vᵢ`.
pub fn bilinear(u: &[c64], v: &[c64]) -> c64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Hermitian product `Σ conj(uᵢ) vᵢ`.
pub fn inner(u: &[c64], v: &[c64]) -> c64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Full eigendecomposition of a general complex matrix.
pub fn eig(a: &Mat<c64>) -> Result<(Vec<c64>, Mat<c64>)> {
    let e = a
        .eigen()
        .map_err(|err| Error::Eigensolver(format!("{err:?} (max entry {:.3e})", max_norm(a))))?;
    let vals = e.S().column_vector().iter().copied().collect();
    Ok((vals, e.U().to_owned()))
}

/// Eigenvalues of a Hermitian matrix (lower triangle referenced), ascending.
pub fn eigvalsh(a: &Mat<c64>) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|err| Error::Eigensolver(format!("{err:?}")))
}
