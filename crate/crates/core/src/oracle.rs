//! Brute-force reference: the Liouvillian as a dense `4^L x 4^L` matrix.
//!
//! Fermions come from the Jordan–Wigner construction
//! `α_j = Z ⊗ ... ⊗ Z ⊗ a ⊗ 1 ⊗ ... ⊗ 1` with `a = |0⟩⟨1|`; site 1 carries
//! no string. Density matrices are column-stacked, `vec(ρ)[i + d j] = ρ_ij`,
//! so `Aρ ↦ (1 ⊗ A)` and `ρB ↦ (Bᵗ ⊗ 1)`. The dissipator is
//!
//! ```text
//! Σ Λ⁺_ij (2α†_i ρ α_j - {α_j α†_i, ρ}) + Λ⁻_ij (2α_i ρ α†_j - {α†_j α_i, ρ})
//! ```

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, I, ONE, ZERO};
use crate::model::ValidatedModel;
use crate::random::random_hermitian;
use crate::spectral::SpectralData;

/// Largest chain the superoperator is built for by default.
pub const DEFAULT_MAX_SITES: usize = 5;
/// Largest chain used for trajectories.
pub const MAX_TRAJECTORY_SITES: usize = 4;
/// Largest chain for which the even-sector prediction is enumerated.
pub const MAX_PREDICTION_SITES: usize = 10;

pub const COLUMN_STACKING: &str = "column-stacking: vec(rho)[i + d*j] = rho[i][j]";

/// Annihilation operators `α_1..α_L` on the `2^L`-dimensional Fock space.
pub fn fermion_operators(sites: usize) -> Vec<CMat> {
    let a = linalg::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
    let z = linalg::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
    let id = linalg::identity(2);
    (0..sites)
        .map(|j| {
            let mut op = linalg::identity(1);
            for site in 0..sites {
                let factor = match site.cmp(&j) {
                    std::cmp::Ordering::Less => &z,
                    std::cmp::Ordering::Equal => &a,
                    std::cmp::Ordering::Greater => &id,
                };
                op = linalg::kron(&op, factor);
            }
            op
        })
        .collect()
}

/// Dense Liouvillian in the column-stacked basis.
#[derive(Debug, Clone)]
pub struct SuperOperator {
    pub sites: usize,
    /// `4^L`.
    pub dim: usize,
    pub matrix: CMat,
    pub basis_convention: &'static str,
    /// Annihilators used to build `matrix`.
    pub operators: Vec<CMat>,
}

fn superoperator_bytes(sites: usize) -> u128 {
    let dim = 1u128 << (2 * sites.min(60));
    dim * dim * 16
}

/// `out += c (bᵗ ⊗ a)`, i.e. the superoperator of `ρ ↦ c a ρ b`.
fn add_sandwich(out: &mut CMat, c: Complex64, a: &CMat, b: &CMat) {
    let d = a.nrows();
    for q in 0..d {
        for p in 0..d {
            let bt = b[(q, p)];
            if bt == ZERO {
                continue;
            }
            let f = c * bt;
            for k in 0..d {
                for i in 0..d {
                    let x = a[(i, k)];
                    if x != ZERO {
                        out[(p * d + i, q * d + k)] += f * x;
                    }
                }
            }
        }
    }
}

pub fn build_liouvillian_superoperator(
    model: &ValidatedModel,
    max_sites: usize,
) -> Result<SuperOperator> {
    let sites = model.sites();
    if sites > max_sites {
        return Err(Error::OracleTooLarge {
            sites,
            max_sites,
            bytes: superoperator_bytes(sites),
        });
    }
    let ops = fermion_operators(sites);
    let adj: Vec<CMat> = ops.iter().map(linalg::adjoint).collect();
    let d = 1usize << sites;
    let dim = d * d;
    let id = linalg::identity(d);

    let mut hamiltonian = linalg::zeros(d, d);
    let mut anti = linalg::zeros(d, d);
    let mut out = linalg::zeros(dim, dim);
    for i in 0..sites {
        for j in 0..sites {
            let h = model.h()[(i, j)];
            if h != ZERO {
                hamiltonian += linalg::scale(&(&adj[i] * &ops[j]), h);
            }
            let gain = model.lambda_plus()[(i, j)];
            if gain != ZERO {
                anti += linalg::scale(&(&ops[j] * &adj[i]), gain);
                add_sandwich(&mut out, 2.0 * gain, &adj[i], &ops[j]);
            }
            let loss = model.lambda_minus()[(i, j)];
            if loss != ZERO {
                anti += linalg::scale(&(&adj[j] * &ops[i]), loss);
                add_sandwich(&mut out, 2.0 * loss, &ops[i], &adj[j]);
            }
        }
    }
    let coherent = linalg::scale(&hamiltonian, -I / model.hbar());
    // Left factor -iH/ħ - anti, right factor +iH/ħ - anti.
    let left = &coherent - &anti;
    let right = -&coherent - &anti;
    add_sandwich(&mut out, ONE, &left, &id);
    add_sandwich(&mut out, ONE, &id, &right);
    Ok(SuperOperator {
        sites,
        dim,
        matrix: out,
        basis_convention: COLUMN_STACKING,
        operators: ops,
    })
}

pub fn vectorize(rho: &CMat) -> CMat {
    let d = rho.nrows();
    CMat::from_fn(d * d, 1, |k, _| rho[(k % d, k / d)])
}

pub fn unvectorize(v: &CMat, d: usize) -> CMat {
    CMat::from_fn(d, d, |i, j| v[(i + d * j, 0)])
}

impl SuperOperator {
    pub fn hilbert_dim(&self) -> usize {
        1 << self.sites
    }

    pub fn apply(&self, rho: &CMat) -> CMat {
        unvectorize(&(&self.matrix * vectorize(rho)), self.hilbert_dim())
    }

    /// `max|vec(1)† L|`: trace preservation.
    pub fn trace_residual(&self) -> f64 {
        let d = self.hilbert_dim();
        (0..self.dim)
            .map(|c| {
                (0..d)
                    .map(|i| self.matrix[(i + d * i, c)])
                    .sum::<Complex64>()
                    .norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest `max|X - X†|` of `L(H)` over `trials` random Hermitian `H`.
    pub fn hermiticity_residual<R: Rng + ?Sized>(&self, rng: &mut R, trials: usize) -> f64 {
        (0..trials)
            .map(|_| {
                let h = random_hermitian(rng, self.hilbert_dim());
                linalg::hermitian_violation(&self.apply(&h))
            })
            .fold(0.0, f64::max)
    }

    /// Largest element coupling basis operators `|i⟩⟨j|` of different
    /// total parity `popcount(i) + popcount(j)`.
    pub fn sector_coupling(&self) -> f64 {
        let d = self.hilbert_dim();
        let parity = |k: usize| ((k % d).count_ones() + (k / d).count_ones()) % 2;
        let mut worst = 0.0f64;
        for c in 0..self.dim {
            for r in 0..self.dim {
                if parity(r) != parity(c) {
                    worst = worst.max(self.matrix[(r, c)].norm());
                }
            }
        }
        worst
    }

    pub fn spectrum(&self) -> Result<Vec<Complex64>> {
        linalg::eigenvalues(&self.matrix)
    }

    /// `O_ij = tr(ρ α†_i α_j)`.
    pub fn observables(&self, rho: &CMat) -> CMat {
        two_point(&self.operators, rho)
    }
}

pub fn two_point(ops: &[CMat], rho: &CMat) -> CMat {
    let n = ops.len();
    CMat::from_fn(n, n, |i, j| {
        let op = linalg::adjoint(&ops[i]) * &ops[j];
        linalg::trace(&(rho * op))
    })
}

#[derive(Debug, Clone)]
pub struct EdSteadyState {
    pub rho: CMat,
    pub o: CMat,
    /// Second-smallest `|Re|` among the Liouvillian eigenvalues.
    pub gap: f64,
}

/// Steady state from the eigenvector of the eigenvalue closest to zero.
pub fn ed_steady_state(so: &SuperOperator) -> Result<EdSteadyState> {
    let (values, vectors) = linalg::eig(&so.matrix)?;
    let scale = values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tolerance = 1e-9 * scale;
    let zero_count = values.iter().filter(|z| z.re.abs() <= tolerance).count();
    if zero_count != 1 {
        return Err(Error::NonUniqueSteadyState {
            count: zero_count,
            tolerance,
        });
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].norm().total_cmp(&values[b].norm()));
    let k = order[0];
    let gap = values
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != k)
        .map(|(_, z)| z.re.abs())
        .fold(f64::INFINITY, f64::min);
    let d = so.hilbert_dim();
    let v = CMat::from_fn(so.dim, 1, |i, _| vectors[(i, k)]);
    let rho = unvectorize(&v, d);
    let rho = linalg::hermitian_part(&linalg::scale(&rho, ONE / linalg::trace(&rho)));
    let o = so.observables(&rho);
    Ok(EdSteadyState { rho, o, gap })
}

/// Even-size subset sums of `{2λ_i} ∪ {2λ_i*}`: `4^L / 2` values.
pub fn predicted_even_spectrum(spectral: &SpectralData) -> Result<Vec<Complex64>> {
    let sites = spectral.sites();
    if sites > MAX_PREDICTION_SITES {
        return Err(Error::OracleTooLarge {
            sites,
            max_sites: MAX_PREDICTION_SITES,
            bytes: (1u128 << (2 * sites.min(60))) * 8,
        });
    }
    let modes: Vec<Complex64> = spectral
        .rapidities
        .iter()
        .map(|z| 2.0 * z)
        .chain(spectral.rapidities.iter().map(|z| 2.0 * z.conj()))
        .collect();
    let count = 1usize << modes.len();
    Ok((0..count)
        .filter(|mask: &usize| mask.count_ones() % 2 == 0)
        .map(|mask| {
            modes
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, z)| *z)
                .sum()
        })
        .collect())
}

/// Gaussian density matrix with two-point function `C_ij = tr(ρ α†_i α_j)`.
///
/// With `Cᵗ = V diag(n) V†` and normal modes `d_k = Σ_j V*_jk α_j` the state
/// is `Π_k [n_k d†_k d_k + (1 - n_k) d_k d†_k]`.
pub fn gaussian_density_matrix(ops: &[CMat], c: &CMat) -> Result<CMat> {
    let n = ops.len();
    if c.nrows() != n || c.ncols() != n {
        return Err(Error::Dimension {
            name: "C0",
            rows: c.nrows(),
            cols: c.ncols(),
            expected: n,
        });
    }
    let (occ, v) = linalg::hermitian_eig(&linalg::transpose(c))?;
    if let Some(x) = occ.iter().find(|x| !(-1e-10..=1.0 + 1e-10).contains(*x)) {
        return Err(Error::InvalidInitialState {
            reason: format!("occupation {x} outside [0, 1]"),
        });
    }
    let d = ops.first().map_or(1, |o| o.nrows());
    let mut rho = linalg::identity(d);
    for (k, &nk) in occ.iter().enumerate() {
        let mut mode = linalg::zeros(d, d);
        for (j, op) in ops.iter().enumerate() {
            mode += linalg::scale(op, v[(j, k)].conj());
        }
        let mode_adj = linalg::adjoint(&mode);
        let nk = nk.clamp(0.0, 1.0);
        let factor = linalg::scale(&(&mode_adj * &mode), Complex64::new(nk, 0.0))
            + linalg::scale(&(&mode * &mode_adj), Complex64::new(1.0 - nk, 0.0));
        rho = rho * factor;
    }
    Ok(linalg::hermitian_part(&rho))
}

/// `O(t)` from `vec ρ(t) = exp(L t) vec ρ0`.
pub fn ed_evolve(so: &SuperOperator, rho0: &CMat, times: &[f64]) -> Result<Vec<CMat>> {
    if so.sites > MAX_TRAJECTORY_SITES {
        return Err(Error::OracleTooLarge {
            sites: so.sites,
            max_sites: MAX_TRAJECTORY_SITES,
            bytes: superoperator_bytes(so.sites),
        });
    }
    let d = so.hilbert_dim();
    if rho0.nrows() != d || rho0.ncols() != d {
        return Err(Error::Dimension {
            name: "rho0",
            rows: rho0.nrows(),
            cols: rho0.ncols(),
            expected: d,
        });
    }
    if (linalg::trace(rho0) - ONE).norm() > 1e-10 || linalg::hermitian_violation(rho0) > 1e-10 {
        return Err(Error::InvalidInitialState {
            reason: "rho0 must be Hermitian with unit trace".into(),
        });
    }
    let v0 = vectorize(rho0);
    Ok(times
        .iter()
        .map(|&t| {
            let e = linalg::expm(&linalg::scale(&so.matrix, Complex64::new(t, 0.0)));
            so.observables(&unvectorize(&(e * &v0), d))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_real_rows;
    use crate::model::{ModelSpec, Tolerances};
    use crate::random::{random_gaussian_correlation, random_model, rng};

    fn single_mode() -> ValidatedModel {
        let s = |x| from_real_rows(&[&[x]]);
        ModelSpec::new(s(0.0), s(0.75), s(0.25)).validate().unwrap()
    }

    fn sorted_by_re(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn canonical_anticommutation() {
        let ops = fermion_operators(3);
        let id = linalg::identity(8);
        for i in 0..3 {
            for j in 0..3 {
                let a = &ops[i] * linalg::adjoint(&ops[j]) + linalg::adjoint(&ops[j]) * &ops[i];
                let want = if i == j {
                    id.clone()
                } else {
                    linalg::zeros(8, 8)
                };
                assert_eq!(linalg::max_abs_diff(&a, &want), 0.0);
                let b = &ops[i] * &ops[j] + &ops[j] * &ops[i];
                assert_eq!(linalg::max_norm(&b), 0.0);
            }
        }
    }

    #[test]
    fn single_mode_spectrum() {
        let so = build_liouvillian_superoperator(&single_mode(), DEFAULT_MAX_SITES).unwrap();
        assert_eq!(so.dim, 4);
        let ev = sorted_by_re(so.spectrum().unwrap());
        for (z, want) in ev.iter().zip([-2.0, -1.0, -1.0, 0.0]) {
            assert!((z - Complex64::new(want, 0.0)).norm() < 1e-12, "{ev:?}");
        }
        let spectral = SpectralData::from_model(&single_mode(), &Tolerances::default()).unwrap();
        let pred = sorted_by_re(predicted_even_spectrum(&spectral).unwrap());
        assert_eq!(
            pred,
            vec![Complex64::new(-2.0, 0.0), Complex64::new(0.0, 0.0)]
        );
    }

    #[test]
    fn single_mode_steady_state() {
        let so = build_liouvillian_superoperator(&single_mode(), DEFAULT_MAX_SITES).unwrap();
        let ss = ed_steady_state(&so).unwrap();
        assert!((ss.o[(0, 0)].re - 0.75).abs() < 1e-12);
        assert!((linalg::trace(&ss.rho) - ONE).norm() < 1e-14);
        assert!((ss.gap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn structural_properties() {
        let mut r = rng(0);
        for sites in 1..=3 {
            let so =
                build_liouvillian_superoperator(&random_model(sites, sites as u64), 5).unwrap();
            assert!(so.trace_residual() < 1e-12);
            assert!(so.hermiticity_residual(&mut r, 3) < 1e-12);
            assert_eq!(so.sector_coupling(), 0.0);
            assert!(so.spectrum().unwrap().iter().all(|z| z.re < 1e-10));
        }
    }

    #[test]
    fn closed_system_is_unitary() {
        let h = from_real_rows(&[&[0.3, 1.0], &[1.0, -0.2]]);
        let z = linalg::zeros(2, 2);
        let m = ModelSpec::new(h, z.clone(), z).validate().unwrap();
        let so = build_liouvillian_superoperator(&m, 5).unwrap();
        assert!(so.spectrum().unwrap().iter().all(|z| z.re.abs() < 1e-12));
        assert!(matches!(
            ed_steady_state(&so),
            Err(Error::NonUniqueSteadyState { .. })
        ));
    }

    #[test]
    fn too_many_sites_is_refused() {
        let err = build_liouvillian_superoperator(&random_model(3, 0), 2).unwrap_err();
        match err {
            Error::OracleTooLarge {
                sites: 3,
                max_sites: 2,
                bytes,
            } => {
                assert_eq!(bytes, 64 * 64 * 16)
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn gaussian_state_reproduces_its_correlations() {
        let mut r = rng(5);
        let ops = fermion_operators(3);
        let c = random_gaussian_correlation(&mut r, 3);
        let rho = gaussian_density_matrix(&ops, &c).unwrap();
        assert!((linalg::trace(&rho) - ONE).norm() < 1e-13);
        assert!(linalg::hermitian_eigenvalues(&rho).unwrap()[0] > -1e-13);
        assert!(linalg::max_abs_diff(&two_point(&ops, &rho), &c) < 1e-13);
    }

    #[test]
    fn single_mode_trajectory() {
        let so = build_liouvillian_superoperator(&single_mode(), 5).unwrap();
        let ops = &so.operators;
        let rho0 = gaussian_density_matrix(ops, &from_real_rows(&[&[0.0]])).unwrap();
        let o = ed_evolve(&so, &rho0, &[0.0, 0.5, 40.0]).unwrap();
        assert_eq!(o[0][(0, 0)].re, 0.0);
        assert!((o[1][(0, 0)].re - 0.75 * (1.0 - (-1f64).exp())).abs() < 1e-13);
        assert!((o[2][(0, 0)].re - 0.75).abs() < 1e-12);
    }
}
