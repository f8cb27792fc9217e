//! Seeded random models and Gaussian initial states.
//!
//! `h = (A + A†)/2` and `Λ± = B B†/L` with `A`, `B` filled by independent
//! standard complex normals, so both gain and loss have full rank and the
//! steady state is unique.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, CMat};
use crate::model::{validate_model, ModelSpec, Tolerances, ValidatedModel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    })
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    linalg::hermitian_part(&complex_gaussian(rng, n, n))
}

/// `B B† / n`, positive semidefinite with unit-order entries.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let b = complex_gaussian(rng, n, n);
    linalg::hermitian_part(&linalg::scale(
        &(&b * b.adjoint()),
        Complex64::new(1.0 / n as f64, 0.0),
    ))
}

pub fn random_spec<R: Rng + ?Sized>(rng: &mut R, sites: usize) -> ModelSpec {
    let h = random_hermitian(rng, sites);
    let lambda_plus = random_psd(rng, sites);
    let lambda_minus = random_psd(rng, sites);
    ModelSpec::new(h, lambda_plus, lambda_minus)
}

pub fn random_model_from<R: Rng + ?Sized>(rng: &mut R, sites: usize) -> ValidatedModel {
    validate_model(random_spec(rng, sites), &Tolerances::default())
        .expect("random models are valid by construction")
}

pub fn random_model(sites: usize, seed: u64) -> ValidatedModel {
    random_model_from(&mut rng(seed), sites)
}

/// A random unitary from the QR factor of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    complex_gaussian(rng, n, n).qr().compute_Q()
}

/// `V diag(n) V†` with occupations `n` uniform in `[0, 1]`: the correlation
/// matrix of a random Gaussian state.
pub fn random_gaussian_correlation<R: Rng + ?Sized>(rng: &mut R, sites: usize) -> CMat {
    let v = random_unitary(rng, sites);
    let n: Vec<Complex64> = (0..sites)
        .map(|_| Complex64::new(rng.random::<f64>(), 0.0))
        .collect();
    linalg::hermitian_part(&(&v * linalg::from_diagonal(&n) * v.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_model() {
        let a = random_model(4, 9);
        let b = random_model(4, 9);
        assert_eq!(linalg::max_abs_diff(a.h(), b.h()), 0.0);
        assert_eq!(
            linalg::max_abs_diff(a.lambda_minus(), b.lambda_minus()),
            0.0
        );
        let c = random_model(4, 10);
        assert!(linalg::max_abs_diff(a.h(), c.h()) > 0.0);
    }

    #[test]
    fn gaussian_correlation_has_unit_interval_spectrum() {
        let mut r = rng(3);
        for n in [1, 2, 5] {
            let c = random_gaussian_correlation(&mut r, n);
            assert_eq!(linalg::hermitian_violation(&c), 0.0);
            for e in linalg::hermitian_eigenvalues(&c).unwrap() {
                assert!((-1e-12..=1.0 + 1e-12).contains(&e));
            }
        }
    }

    #[test]
    fn unitary_is_unitary() {
        let u = random_unitary(&mut rng(1), 6);
        let d = linalg::max_abs_diff(&(u.adjoint() * &u), &linalg::identity(6));
        assert!(d < 1e-13);
    }
}
