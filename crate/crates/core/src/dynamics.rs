//! Time evolution of the correlation matrix `C_ij(t) = tr(ρ(t) α†_i α_j)`.
//!
//! Writing `G = Cᵗ`, the flow is `dG/dt = 2(PG + GP†) + 2Λ⁺`. In the
//! eigenbasis of `P` every entry evolves independently with rate
//! `μ_ij = 2(λ_i + λ_j*)`, so the propagation is exact at any time.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::model::{Tolerances, ValidatedModel};
use crate::spectral::SpectralData;
use crate::steady::solve_lyapunov_schur;
use crate::structure::build_p;

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub covariances: Vec<CMat>,
    /// Slowest decay rate `2 min(-Re λ)`; `None` for marginal models.
    pub gap: Option<f64>,
    /// Some `λ_i + λ_j*` vanishes, so the state need not relax.
    pub marginal: bool,
    pub low_confidence: bool,
}

/// Slowest Liouvillian decay rate `2 min_i(-Re λ_i)`.
pub fn spectral_gap(spectral: &SpectralData) -> Result<f64> {
    let max_real = spectral.max_real();
    if 2.0 * max_real >= -spectral.gap_tolerance {
        return Err(Error::NoGap { max_real });
    }
    Ok(-2.0 * max_real)
}

fn check_initial(c0: &CMat, sites: usize, tol: &Tolerances) -> Result<()> {
    if c0.nrows() != sites || c0.ncols() != sites {
        return Err(Error::Dimension {
            name: "C0",
            rows: c0.nrows(),
            cols: c0.ncols(),
            expected: sites,
        });
    }
    let violation = linalg::hermitian_violation(c0);
    let tolerance = tol.hermitian * linalg::max_norm(c0).max(1.0);
    if violation.is_nan() || violation > tolerance {
        return Err(Error::NotHermitian {
            name: "C0",
            violation,
            tolerance,
        });
    }
    for e in linalg::hermitian_eigenvalues(c0)? {
        if e < -tol.occupation || e > 1.0 + tol.occupation {
            return Err(Error::InvalidInitialState {
                reason: format!("occupation {e} outside [0, 1]"),
            });
        }
    }
    Ok(())
}

/// `(e^{x} - 1)/x`, accurate near zero.
fn phi(x: Complex64) -> Complex64 {
    if x.norm() < 1e-2 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..12 {
            term *= x / k as f64;
            sum += term;
        }
        sum
    } else {
        (x.exp() - 1.0) / x
    }
}

/// Evolves `C0` to each of `times`; `C(0)` is returned unchanged.
pub fn evolve_covariance(
    model: &ValidatedModel,
    c0: &CMat,
    times: &[f64],
    tol: &Tolerances,
) -> Result<EvolutionResult> {
    let sites = model.sites();
    check_initial(c0, sites, tol)?;
    if let Some(&t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::InvalidParameter {
            name: "times",
            value: t,
            reason: "times must be finite and nonnegative",
        });
    }
    let spectral = SpectralData::from_model(model, tol)?;
    let marginal = spectral.is_marginal();
    let gap = spectral_gap(&spectral).ok();
    let g0 = linalg::transpose(c0);

    let propagate: Box<dyn Fn(f64) -> CMat> = if !spectral.low_confidence {
        let w = spectral.w_p.clone();
        let w_inv = linalg::inverse(&w);
        let g0t = &w_inv * &g0 * w_inv.adjoint();
        let ft = &w_inv * model.lambda_plus() * w_inv.adjoint();
        let r = spectral.rapidities.clone();
        Box::new(move |t| {
            let gt = CMat::from_fn(sites, sites, |i, j| {
                let mu = 2.0 * (r[i] + r[j].conj());
                (mu * t).exp() * g0t[(i, j)] + 2.0 * t * phi(mu * t) * ft[(i, j)]
            });
            &w * gt * w.adjoint()
        })
    } else if !marginal {
        // G(t) = E (G0 - G∞) E† + G∞ with E = exp(2Pt) and G∞ = -Ω.
        let p = build_p(model);
        let g_inf = -solve_lyapunov_schur(&p, model.lambda_plus())?;
        let d0 = &g0 - &g_inf;
        Box::new(move |t| {
            let e = linalg::expm(&linalg::scale(&p, Complex64::new(2.0 * t, 0.0)));
            &e * &d0 * e.adjoint() + &g_inf
        })
    } else {
        return Err(Error::IllConditioned {
            condition: spectral.condition_estimate,
            threshold: tol.condition_threshold,
        });
    };

    let covariances = times
        .iter()
        .map(|&t| {
            if t == 0.0 {
                c0.clone()
            } else {
                linalg::hermitian_part(&linalg::transpose(&propagate(t)))
            }
        })
        .collect();
    Ok(EvolutionResult {
        times: times.to_vec(),
        covariances,
        gap,
        marginal,
        low_confidence: spectral.low_confidence,
    })
}

/// Least-squares decay rate of `values` over the sample points with
/// `times >= t_from`: the negated slope of `ln(values)` against time.
pub fn tail_decay_rate(times: &[f64], values: &[f64], t_from: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, v)| **t >= t_from && **v > 0.0)
        .map(|(t, v)| (*t, v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    (sxx > 0.0).then(|| -sxy / sxx)
}

/// Evenly spaced times `0, dt, ..., t_max` with `n` points.
pub fn linspace(t_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolutionSummary {
    pub times: Vec<f64>,
    pub occupations: Vec<Vec<f64>>,
    pub gap: Option<f64>,
    pub marginal: bool,
}

impl From<&EvolutionResult> for EvolutionSummary {
    fn from(r: &EvolutionResult) -> Self {
        EvolutionSummary {
            times: r.times.clone(),
            occupations: r
                .covariances
                .iter()
                .map(|c| (0..c.nrows()).map(|i| c[(i, i)].re).collect())
                .collect(),
            gap: r.gap,
            marginal: r.marginal,
        }
    }
}
