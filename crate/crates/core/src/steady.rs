//! Steady state: the Lyapunov equation `PΩ + ΩP† = Λ⁺` and the observable
//! matrix `O = -Ωᵗ`, `O_ij = tr(ρ α†_i α_j)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::model::{Tolerances, ValidatedModel};
use crate::spectral::SpectralData;
use crate::structure::{build_p, is_tridiagonal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LyapunovMethod {
    /// `Q_ij = (W⁻¹ Λ⁺ W⁻†)_ij / (λ_i + λ_j*)`.
    Spectral,
    /// Bartels–Stewart on the complex Schur form of `P`.
    Schur,
}

#[derive(Debug, Clone)]
pub struct LyapunovSolution {
    pub omega: CMat,
    /// `W⁻¹ Ω W⁻†`, re-Hermitized.
    pub q: CMat,
    /// `max|Q - Q†|` before re-Hermitization.
    pub q_hermitian_violation: f64,
    pub method: LyapunovMethod,
}

fn check_not_marginal(spectral: &SpectralData) -> Result<()> {
    if let Some(&(i, j)) = spectral.degenerate_pairs.first() {
        let r = &spectral.rapidities;
        return Err(Error::MarginalSteadyState {
            i,
            j,
            magnitude: (r[i] + r[j].conj()).norm(),
            tolerance: spectral.gap_tolerance,
        });
    }
    Ok(())
}

/// `max|PΩ + ΩP† - F|`.
pub fn lyapunov_residual(p: &CMat, omega: &CMat, rhs: &CMat) -> f64 {
    let mut r = p * omega;
    r += omega * p.adjoint();
    r -= rhs;
    linalg::max_norm(&r)
}

/// Solves `PΩ + ΩP† = Λ⁺`.
///
/// Uses the eigenbasis of `P` unless it is flagged low confidence, in which
/// case the Schur route is taken.
pub fn solve_lyapunov(
    p: &CMat,
    lambda_plus: &CMat,
    spectral: &SpectralData,
) -> Result<LyapunovSolution> {
    check_not_marginal(spectral)?;
    let w = &spectral.w_p;
    let w_inv = linalg::inverse(w);
    if !spectral.low_confidence {
        let mut q = &w_inv * lambda_plus * w_inv.adjoint();
        let r = &spectral.rapidities;
        for j in 0..q.ncols() {
            for i in 0..q.nrows() {
                q[(i, j)] /= r[i] + r[j].conj();
            }
        }
        let q_hermitian_violation = linalg::hermitian_violation(&q);
        let q = linalg::hermitian_part(&q);
        let omega = linalg::hermitian_part(&(w * &q * w.adjoint()));
        Ok(LyapunovSolution {
            omega,
            q,
            q_hermitian_violation,
            method: LyapunovMethod::Spectral,
        })
    } else {
        let omega = solve_lyapunov_schur(p, lambda_plus)?;
        let q = &w_inv * &omega * w_inv.adjoint();
        Ok(LyapunovSolution {
            omega,
            q_hermitian_violation: linalg::hermitian_violation(&q),
            q: linalg::hermitian_part(&q),
            method: LyapunovMethod::Schur,
        })
    }
}

/// Bartels–Stewart for `PX + XP† = F` with `F` Hermitian.
///
/// With `P = Z T Z†` the transformed unknown `Y = Z† X Z` satisfies
/// `T Y + Y T† = Z† F Z`; its columns are found from last to first by
/// triangular back substitution.
pub fn solve_lyapunov_schur(p: &CMat, rhs: &CMat) -> Result<CMat> {
    let n = p.nrows();
    let schur = linalg::complex_schur(p)?;
    let (z, t) = (&schur.z, &schur.t);
    let f = z.adjoint() * rhs * z;
    let mut y = linalg::zeros(n, n);
    for j in (0..n).rev() {
        let shift = t[(j, j)].conj();
        let mut b: Vec<Complex64> = (0..n).map(|i| f[(i, j)]).collect();
        for k in j + 1..n {
            let c = t[(j, k)].conj();
            for (i, bi) in b.iter_mut().enumerate() {
                *bi -= c * y[(i, k)];
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= t[(i, k)] * y[(k, j)];
            }
            let d = t[(i, i)] + shift;
            if d.norm() == 0.0 {
                return Err(Error::MarginalSteadyState {
                    i,
                    j,
                    magnitude: 0.0,
                    tolerance: 0.0,
                });
            }
            y[(i, j)] = s / d;
        }
    }
    Ok(linalg::hermitian_part(&(z * &y * z.adjoint())))
}

/// `O = -Ωᵗ`, checked to be Hermitian with spectrum inside `[0, 1]`.
pub fn observables(omega: &CMat, tol: &Tolerances) -> Result<CMat> {
    let o = -linalg::transpose(omega);
    for e in linalg::hermitian_eigenvalues(&o)? {
        if e < -tol.occupation || e > 1.0 + tol.occupation {
            return Err(Error::OccupationOutOfRange { value: e });
        }
    }
    Ok(o)
}

pub fn occupations(o: &CMat) -> Vec<f64> {
    (0..o.nrows()).map(|i| o[(i, i)].re).collect()
}

/// Bond currents `j_l = -(2/ħ) Im(h_{l,l+1} O_{l,l+1})`, positive for
/// particles moving from site `l` to `l+1`.
pub fn particle_current(o: &CMat, model: &ValidatedModel) -> Result<Vec<f64>> {
    let h = model.h();
    let n = h.nrows();
    for j in 0..n {
        for i in 0..n {
            if i.abs_diff(j) > 1 && h[(i, j)].norm() != 0.0 {
                return Err(Error::NotAChain {
                    i,
                    j,
                    magnitude: h[(i, j)].norm(),
                });
            }
        }
    }
    Ok((0..n.saturating_sub(1))
        .map(|l| -2.0 / model.hbar() * (h[(l, l + 1)] * o[(l, l + 1)]).im)
        .collect())
}

#[derive(Debug, Clone)]
pub struct SteadyStateData {
    pub omega: CMat,
    pub q: CMat,
    pub o: CMat,
    pub occupations: Vec<f64>,
    /// Bond currents; `None` unless `h` is tridiagonal.
    pub currents: Option<Vec<f64>>,
    pub lyapunov_residual: f64,
    pub q_hermitian_violation: f64,
    pub method: LyapunovMethod,
}

impl SteadyStateData {
    /// Largest minus smallest bond current.
    pub fn current_spread(&self) -> Option<f64> {
        let c = self.currents.as_ref()?;
        let max = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = c.iter().copied().fold(f64::INFINITY, f64::min);
        Some(if c.is_empty() { 0.0 } else { max - min })
    }
}

pub fn steady_state(
    model: &ValidatedModel,
    spectral: &SpectralData,
    tol: &Tolerances,
) -> Result<SteadyStateData> {
    let p = build_p(model);
    let sol = solve_lyapunov(&p, model.lambda_plus(), spectral)?;
    let o = observables(&sol.omega, tol)?;
    let currents = if is_tridiagonal(model.h()) {
        Some(particle_current(&o, model)?)
    } else {
        None
    };
    Ok(SteadyStateData {
        lyapunov_residual: lyapunov_residual(&p, &sol.omega, model.lambda_plus()),
        occupations: occupations(&o),
        omega: sol.omega,
        q: sol.q,
        o,
        currents,
        q_hermitian_violation: sol.q_hermitian_violation,
        method: sol.method,
    })
}

/// Rapidities and steady state in one call.
pub fn solve(model: &ValidatedModel, tol: &Tolerances) -> Result<(SpectralData, SteadyStateData)> {
    let spectral = SpectralData::from_model(model, tol)?;
    let steady = steady_state(model, &spectral, tol)?;
    Ok((spectral, steady))
}
