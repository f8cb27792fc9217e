//! Dense complex matrix helpers shared by the solver modules.
//!
//! Heavy kernels (non-Hermitian EVD, LU, SVD, matmul) come from `faer`;
//! this module adds the small pieces the pipeline needs on top: norms,
//! Hermiticity checks, Kronecker products, a complex Schur form, the
//! matrix exponential and multiset matching of spectra.

mod expm;
mod matching;
mod schur;

pub use expm::expm;
pub use matching::{match_into, match_multisets, Matching};
pub use schur::{complex_schur, Schur};

use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix used throughout the crate.
pub type CMat = Mat<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn zeros(rows: usize, cols: usize) -> CMat {
    Mat::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMat {
    Mat::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
}

pub fn from_diagonal(values: &[Complex64]) -> CMat {
    let n = values.len();
    Mat::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO })
}

/// Builds a matrix from row-major nested rows. All rows must have equal length.
pub fn from_rows(rows: &[Vec<Complex64>]) -> CMat {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    Mat::from_fn(n, m, |i, j| rows[i][j])
}

pub fn to_rows(a: &CMat) -> Vec<Vec<Complex64>> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect())
        .collect()
}

pub fn from_real_rows(rows: &[&[f64]]) -> CMat {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    Mat::from_fn(n, m, |i, j| Complex64::new(rows[i][j], 0.0))
}

pub fn adjoint(a: &CMat) -> CMat {
    a.adjoint().to_owned()
}

pub fn transpose(a: &CMat) -> CMat {
    a.transpose().to_owned()
}

pub fn conjugate(a: &CMat) -> CMat {
    a.conjugate().to_owned()
}

pub fn scale(a: &CMat, s: Complex64) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

/// Largest absolute entry.
pub fn max_norm(a: &CMat) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

/// Induced 1-norm (max column sum).
pub fn one_norm(a: &CMat) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `max |a - b|` over all entries.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    m
}

/// `max |A - A^H|`.
pub fn hermitian_violation(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut m = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            m = m.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    m
}

/// `(A + A^H) / 2`.
pub fn hermitian_part(a: &CMat) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| {
        (a[(i, j)] + a[(j, i)].conj()) * 0.5
    })
}

pub fn trace(a: &CMat) -> Complex64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

/// Eigenvalues of the Hermitian part of `a`, ascending.
pub fn hermitian_eigenvalues(a: &CMat) -> Result<Vec<f64>> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let h = hermitian_part(a);
    h.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::EigenNoConvergence { dim: a.nrows() })
}

/// Eigenpairs of the Hermitian part of `a`, eigenvalues ascending.
pub fn hermitian_eig(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    let n = a.nrows();
    if n == 0 {
        return Ok((Vec::new(), zeros(0, 0)));
    }
    let e = hermitian_part(a)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenNoConvergence { dim: n })?;
    let values = e.S().column_vector().iter().map(|z| z.re).collect();
    Ok((values, e.U().to_owned()))
}

/// Right eigenpairs of a general complex matrix, in solver order.
pub fn eig(a: &CMat) -> Result<(Vec<Complex64>, CMat)> {
    let n = a.nrows();
    if n == 0 {
        return Ok((Vec::new(), zeros(0, 0)));
    }
    let e = a
        .eigen()
        .map_err(|_| Error::EigenNoConvergence { dim: n })?;
    let values = e.S().column_vector().iter().copied().collect();
    Ok((values, e.U().to_owned()))
}

pub fn eigenvalues(a: &CMat) -> Result<Vec<Complex64>> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    a.eigenvalues()
        .map_err(|_| Error::EigenNoConvergence { dim: a.nrows() })
}

/// 2-norm condition number `sigma_max / sigma_min`; infinite when singular.
pub fn condition_number(a: &CMat) -> Result<f64> {
    if a.nrows() == 0 {
        return Ok(1.0);
    }
    let s = a
        .singular_values()
        .map_err(|_| Error::EigenNoConvergence { dim: a.nrows() })?;
    let max = s.iter().copied().fold(0.0f64, f64::max);
    let min = s.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(max / min)
    }
}

/// Inverse through partially pivoted LU.
pub fn inverse(a: &CMat) -> CMat {
    a.partial_piv_lu().inverse()
}

/// Solves `a x = b` through partially pivoted LU.
pub fn solve(a: &CMat, b: &CMat) -> CMat {
    use faer::linalg::solvers::Solve;
    a.partial_piv_lu().solve(b)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = (a.nrows(), a.ncols());
    let (br, bc) = (b.nrows(), b.ncols());
    let mut out = zeros(ar * br, ac * bc);
    for ja in 0..ac {
        for ia in 0..ar {
            let x = a[(ia, ja)];
            if x == ZERO {
                continue;
            }
            for jb in 0..bc {
                for ib in 0..br {
                    out[(ia * br + ib, ja * bc + jb)] = x * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Block matrix `[[a, b], [c, d]]` from four equally sized square blocks.
pub fn block2x2(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> CMat {
    let n = a.nrows();
    Mat::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, true) => a[(i, j)],
        (true, false) => b[(i, j - n)],
        (false, true) => c[(i - n, j)],
        (false, false) => d[(i - n, j - n)],
    })
}

/// Extracts the `n x n` block at block coordinates `(bi, bj)`.
pub fn block(a: &CMat, n: usize, bi: usize, bj: usize) -> CMat {
    Mat::from_fn(n, n, |i, j| a[(bi * n + i, bj * n + j)])
}

/// Largest off-diagonal magnitude.
pub fn off_diagonal_max(a: &CMat) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if i != j {
                m = m.max(a[(i, j)].norm());
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kron_matches_definition() {
        let a = from_rows(&[vec![c(1., 0.), c(2., 0.)], vec![c(0., 1.), c(0., 0.)]]);
        let b = identity(2);
        let k = kron(&a, &b);
        assert_eq!(k[(0, 2)], c(2., 0.));
        assert_eq!(k[(3, 1)], c(0., 1.));
        assert_eq!(k[(1, 0)], ZERO);
    }

    #[test]
    fn hermitian_violation_detects_asymmetry() {
        let a = from_real_rows(&[&[0., 1.], &[0., 0.]]);
        assert_eq!(hermitian_violation(&a), 1.0);
        assert_eq!(hermitian_violation(&hermitian_part(&a)), 0.0);
    }

    #[test]
    fn inverse_of_diagonal() {
        let a = from_diagonal(&[c(2., 0.), c(0., 4.)]);
        let inv = inverse(&a);
        assert!((inv[(1, 1)] - c(0., -0.25)).norm() < 1e-15);
    }

    #[test]
    fn condition_number_of_scaled_identity_is_one() {
        let a = scale(&identity(5), c(3., 1.));
        assert!((condition_number(&a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_of_empty_matrix() {
        let (v, u) = eig(&zeros(0, 0)).unwrap();
        assert!(v.is_empty());
        assert_eq!(u.nrows(), 0);
    }
}
