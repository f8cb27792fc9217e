//! Complex Schur decomposition `A = Z T Z^H` by Householder reduction to
//! Hessenberg form followed by single-shift implicit QR sweeps.
//!
//! Used by the Bartels–Stewart Lyapunov fallback, where the unitary basis
//! stays well conditioned even when the eigenvector basis does not.

use num_complex::Complex64;

use super::{identity, CMat, ZERO};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Schur {
    /// Unitary Schur vectors.
    pub z: CMat,
    /// Upper-triangular factor; its diagonal holds the eigenvalues.
    pub t: CMat,
}

impl Schur {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.t.nrows()).map(|i| self.t[(i, i)]).collect()
    }
}

/// Plane rotation `[[c, s], [-conj(s), c]]` that zeroes `b` in `(a, b)`.
#[derive(Clone, Copy)]
struct Givens {
    c: f64,
    s: Complex64,
}

impl Givens {
    fn new(a: Complex64, b: Complex64) -> Self {
        let na = a.norm();
        let nb = b.norm();
        if nb == 0.0 {
            return Givens { c: 1.0, s: ZERO };
        }
        if na == 0.0 {
            return Givens {
                c: 0.0,
                s: Complex64::new(1.0, 0.0) * (b.conj() / nb),
            };
        }
        let rho = na.hypot(nb);
        Givens {
            c: na / rho,
            s: (a / na) * b.conj() / rho,
        }
    }

    /// Rows `p`, `p+1` of `m`, columns `cols`.
    fn rotate_rows(&self, m: &mut CMat, p: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let x = m[(p, j)];
            let y = m[(p + 1, j)];
            m[(p, j)] = x * self.c + self.s * y;
            m[(p + 1, j)] = -self.s.conj() * x + y * self.c;
        }
    }

    /// Columns `p`, `p+1` of `m` times the adjoint rotation, rows `rows`.
    fn rotate_cols(&self, m: &mut CMat, p: usize, rows: std::ops::Range<usize>) {
        for i in rows {
            let x = m[(i, p)];
            let y = m[(i, p + 1)];
            m[(i, p)] = x * self.c + self.s.conj() * y;
            m[(i, p + 1)] = -self.s * x + y * self.c;
        }
    }
}

fn hessenberg(a: &CMat) -> (CMat, CMat) {
    let n = a.nrows();
    let mut h = a.clone();
    let mut q = identity(n);
    for k in 0..n.saturating_sub(2) {
        let alpha_norm = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        // v = x + phase*|x| e1, reflector I - 2 v v^H / (v^H v)
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] += phase * alpha_norm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // H <- (I - beta v v^H) H
        for j in 0..n {
            let mut dot = ZERO;
            for (r, vi) in v.iter().enumerate() {
                dot += vi.conj() * h[(k + 1 + r, j)];
            }
            dot *= beta;
            for (r, vi) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= vi * dot;
            }
        }
        // H <- H (I - beta v v^H), Q <- Q (I - beta v v^H)
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let mut dot = ZERO;
                for (r, vi) in v.iter().enumerate() {
                    dot += m[(i, k + 1 + r)] * vi;
                }
                dot *= beta;
                for (r, vi) in v.iter().enumerate() {
                    m[(i, k + 1 + r)] -= dot * vi.conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let mu1 = mid + disc;
    let mu2 = mid - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

/// Computes `A = Z T Z^H` with `Z` unitary and `T` upper triangular.
pub fn complex_schur(a: &CMat) -> Result<Schur> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "Schur decomposition needs a square matrix");
    let (mut h, mut z) = hessenberg(a);
    if n <= 1 {
        return Ok(Schur { z, t: h });
    }
    let eps = f64::EPSILON;
    let max_iter = 60 * n.max(10);
    let mut ihi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while ihi > 0 {
        // locate the start of the active unreduced block
        let mut l = ihi;
        while l > 0 {
            let scale = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let scale = if scale == 0.0 { 1.0 } else { scale };
            if h[(l, l - 1)].norm() <= eps * scale {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == ihi {
            ihi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_iter {
            return Err(Error::EigenNoConvergence { dim: n });
        }
        let shift = if iter % 11 == 0 {
            // exceptional shift to break cycles
            h[(ihi, ihi)] + Complex64::new(h[(ihi, ihi - 1)].norm() * 0.75, 0.0)
        } else {
            wilkinson_shift(
                h[(ihi - 1, ihi - 1)],
                h[(ihi - 1, ihi)],
                h[(ihi, ihi - 1)],
                h[(ihi, ihi)],
            )
        };
        // implicit single-shift sweep over rows/cols l..=ihi
        let mut x = h[(l, l)] - shift;
        let mut y = h[(l + 1, l)];
        for k in l..ihi {
            let g = Givens::new(x, y);
            let col_start = if k > l { k - 1 } else { l };
            g.rotate_rows(&mut h, k, col_start..n);
            let row_end = (k + 3).min(ihi + 1);
            g.rotate_cols(&mut h, k, 0..row_end);
            g.rotate_cols(&mut z, k, 0..n);
            if k > l {
                h[(k + 1, k - 1)] = ZERO;
            }
            if k + 1 < ihi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = ZERO;
        }
    }
    Ok(Schur { z, t: h })
}
