//! The derived matrices `K`, `M` and `P` of a quadratic Lindbladian.
//!
//! With `K = (-ih/ħ + Λ⁺ - Λ⁻ᵗ)/2` the Liouvillian acts on the `2L`
//! superoperator modes through
//!
//! ```text
//! M = [[K, Λ⁺], [Λ⁻ᵗ, -K†]]
//! ```
//!
//! and the relation `Y M Y = -M†` reduces its spectrum to that of the
//! `L x L` matrix `P = K - Λ⁺`.

use num_complex::Complex64;

use crate::linalg::{self, CMat, I, ZERO};
use crate::model::ValidatedModel;

/// `K`, `M` and `P` for one model.
#[derive(Debug, Clone)]
pub struct StructureMatrices {
    pub k: CMat,
    pub m: CMat,
    pub p: CMat,
}

impl StructureMatrices {
    pub fn new(model: &ValidatedModel) -> Self {
        StructureMatrices {
            k: build_k(model),
            m: build_m(model),
            p: build_p(model),
        }
    }

    pub fn sites(&self) -> usize {
        self.p.nrows()
    }
}

fn hamiltonian_part(model: &ValidatedModel) -> CMat {
    linalg::scale(model.h(), -I / model.hbar())
}

pub fn build_k(model: &ValidatedModel) -> CMat {
    let mut k = hamiltonian_part(model);
    k += model.lambda_plus();
    k -= linalg::transpose(model.lambda_minus());
    linalg::scale(&k, Complex64::new(0.5, 0.0))
}

pub fn build_m(model: &ValidatedModel) -> CMat {
    let k = build_k(model);
    let minus_k_adj = linalg::scale(&linalg::adjoint(&k), Complex64::new(-1.0, 0.0));
    linalg::block2x2(
        &k,
        model.lambda_plus(),
        &linalg::transpose(model.lambda_minus()),
        &minus_k_adj,
    )
}

pub fn build_p(model: &ValidatedModel) -> CMat {
    let mut p = hamiltonian_part(model);
    p -= model.lambda_plus();
    p -= linalg::transpose(model.lambda_minus());
    linalg::scale(&p, Complex64::new(0.5, 0.0))
}

/// `max|P + P† + Λ⁺ + Λ⁻ᵗ|`, zero up to rounding.
pub fn dissipation_residual(p: &CMat, model: &ValidatedModel) -> f64 {
    let mut r = p + linalg::adjoint(p);
    r += model.lambda_plus();
    r += linalg::transpose(model.lambda_minus());
    linalg::max_norm(&r)
}

/// `tr P = [-i tr(h)/ħ + tr(Λ⁻ᵗ - Λ⁺)] / 2`.
pub fn trace_p(model: &ValidatedModel) -> Complex64 {
    let th = linalg::trace(model.h());
    let tp = linalg::trace(model.lambda_plus());
    let tm = linalg::trace(model.lambda_minus());
    0.5 * (-I * th / model.hbar() - tp - tm)
}

/// The block Pauli matrices `X_L`, `Y_L`, `Z_L` acting on `2L` modes.
#[derive(Debug, Clone)]
pub struct PauliBlocks {
    pub x: CMat,
    pub y: CMat,
    pub z: CMat,
}

impl PauliBlocks {
    pub fn new(sites: usize) -> Self {
        let id = linalg::identity(sites);
        let zero = linalg::zeros(sites, sites);
        let neg = linalg::scale(&id, Complex64::new(-1.0, 0.0));
        let x = linalg::block2x2(&zero, &id, &id, &zero);
        let y = linalg::scale(&linalg::block2x2(&zero, &id, &neg, &zero), -I);
        let z = linalg::block2x2(&id, &zero, &zero, &neg);
        PauliBlocks { x, y, z }
    }
}

/// `max|Y M Y + M†|`.
pub fn check_m_symmetry(m: &CMat) -> f64 {
    let n = m.nrows() / 2;
    let y = PauliBlocks::new(n).y;
    let mut r = &y * m * &y;
    r += linalg::adjoint(m);
    linalg::max_norm(&r)
}

/// True when every entry beyond the first off-diagonals is exactly zero.
pub fn is_tridiagonal(a: &CMat) -> bool {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if i.abs_diff(j) > 1 && a[(i, j)] != ZERO {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_real_rows;
    use crate::model::{ModelSpec, XxChainParams};
    use crate::random::random_model;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single_mode() -> ValidatedModel {
        let s = |x| from_real_rows(&[&[x]]);
        ModelSpec::new(s(0.0), s(0.75), s(0.25)).validate().unwrap()
    }

    #[test]
    fn single_mode_matrices() {
        let m = single_mode();
        let s = StructureMatrices::new(&m);
        assert_eq!(s.k[(0, 0)], c(0.25, 0.0));
        assert_eq!(s.p[(0, 0)], c(-0.5, 0.0));
        let want = from_real_rows(&[&[0.25, 0.75], &[0.25, -0.25]]);
        assert_eq!(linalg::max_abs_diff(&s.m, &want), 0.0);
        let mut ev = linalg::eigenvalues(&s.m).unwrap();
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((ev[0] - c(-0.5, 0.0)).norm() < 1e-14);
        assert!((ev[1] - c(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn closed_system_limit() {
        let s = |x| from_real_rows(&[&[x]]);
        let m = ModelSpec::new(s(2.0), s(0.0), s(0.0)).validate().unwrap();
        let st = StructureMatrices::new(&m);
        assert_eq!(st.k[(0, 0)], c(0.0, -1.0));
        assert_eq!(st.m[(0, 0)], c(0.0, -1.0));
        assert_eq!(st.m[(1, 1)], c(0.0, -1.0));
        assert_eq!(st.m[(0, 1)], ZERO);
    }

    #[test]
    fn two_site_chain_k() {
        let m = XxChainParams::new(2, 1.0, 0.0, 2.0, 0.0)
            .with_fillings(1.0, 0.5)
            .model()
            .unwrap();
        let k = build_k(&m);
        assert_eq!(k[(0, 0)], c(1.0, 0.0));
        assert_eq!(k[(0, 1)], c(0.0, -0.5));
        assert_eq!(k[(1, 0)], c(0.0, -0.5));
        assert_eq!(k[(1, 1)], ZERO);
    }

    #[test]
    fn three_site_chain_p() {
        let m = XxChainParams::new(3, 1.0, 0.5, 2.0, 0.5).model().unwrap();
        let p = build_p(&m);
        assert_eq!(p[(0, 0)], c(-1.0, -0.5));
        assert_eq!(p[(1, 1)], c(0.0, -0.5));
        assert_eq!(p[(2, 2)], c(-0.25, -0.5));
        assert_eq!(p[(0, 1)], c(0.0, -0.5));
        assert_eq!(p[(2, 1)], c(0.0, -0.5));
        assert_eq!(p[(0, 2)], ZERO);
    }

    #[test]
    fn pauli_relations() {
        let b = PauliBlocks::new(3);
        let id = linalg::identity(6);
        for a in [&b.x, &b.y, &b.z] {
            assert_eq!(linalg::max_abs_diff(&(a * a), &id), 0.0);
        }
        let zx = &b.z * &b.x;
        assert_eq!(
            linalg::max_abs_diff(&zx, &linalg::scale(&(&b.x * &b.z), c(-1.0, 0.0))),
            0.0
        );
        assert_eq!(linalg::max_abs_diff(&zx, &linalg::scale(&b.y, I)), 0.0);
    }

    #[test]
    fn symmetry_and_identities_on_random_models() {
        for seed in 0..5 {
            let m = random_model(8, seed);
            let s = StructureMatrices::new(&m);
            assert!(check_m_symmetry(&s.m) <= 1e-12);
            assert!(dissipation_residual(&s.p, &m) <= 1e-12);
            assert!((linalg::trace(&s.p) - trace_p(&m)).norm() < 1e-12);
        }
        assert_eq!(check_m_symmetry(&build_m(&single_mode())), 0.0);
    }

    #[test]
    fn corrupted_block_breaks_symmetry() {
        let m = random_model(3, 11);
        let mut big = build_m(&m);
        for i in 0..3 {
            for j in 0..3 {
                big[(i + 3, j + 3)] = -big[(i + 3, j + 3)];
            }
        }
        assert!(check_m_symmetry(&big) > 0.1);
    }

    #[test]
    fn chain_h_is_tridiagonal() {
        let m = XxChainParams::new(5, 1.0, 0.0, 1.0, 1.0).model().unwrap();
        assert!(is_tridiagonal(m.h()));
        assert!(!is_tridiagonal(random_model(4, 0).h()));
    }
}
