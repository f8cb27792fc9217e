//! Closed-form rapidities of the boundary-driven XX chain.
//!
//! `P` is a bordered tridiagonal Toeplitz matrix. Under `J² = ħ²Γ₁Γ_L`
//! its eigenvalues take the form `ħλ = -i(h_z + |J| cos θ)` with
//! `θ = α + iβ`, `α = kπ/L` and
//!
//! ```text
//! β = ln[(1 + x sin α) / (1 - x sin α)] / (2L),   x = 2√κ/(κ+1),   κ = (J/ħΓ₁)²
//! ```
//!
//! for `k = 1..L-1`. The last eigenvalue follows from `tr P`. These
//! expressions are the long-chain limit; `refined_rapidities` solves the
//! exact secular equation
//!
//! ```text
//! 2 cos(Lθ) sin θ + i ħ(Γ₁+Γ_L)/|J| sin(Lθ) = 0
//! ```
//!
//! by Newton iteration seeded with them.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, I};
use crate::model::{Tolerances, XxChainParams};
use crate::spectral::SpectralData;

const CONDITION_RELATIVE: f64 = 1e-12;
/// `1 - x sin α` below this is treated as the divergent point.
const DIVERGENCE_MARGIN: f64 = 1e-12;

/// True iff `J² = ħ²Γ₁Γ_L` to relative precision `1e-12`.
pub fn check_condition(params: &XxChainParams) -> bool {
    let j2 = params.j * params.j;
    let g2 = params.hbar * params.hbar * params.gamma_1 * params.gamma_l;
    (j2 - g2).abs() <= CONDITION_RELATIVE * j2.max(g2)
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyticSpectrum {
    pub kappa: f64,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// `L - 1` closed-form values followed by the trace completion.
    #[serde(serialize_with = "serialize_complex_vec")]
    pub lambdas: Vec<Complex64>,
    pub condition_satisfied: bool,
}

fn serialize_complex_vec<S: serde::Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

/// `tr P = -iL h_z/ħ - (Γ₁ + Γ_L)/2`.
pub fn trace_p(params: &XxChainParams) -> Complex64 {
    let l = params.sites as f64;
    Complex64::new(
        -(params.gamma_1 + params.gamma_l) / 2.0,
        -l * params.h_z / params.hbar,
    )
}

fn check_applicable(params: &XxChainParams) -> Result<()> {
    params.validate()?;
    if !check_condition(params) {
        return Err(Error::ClosedFormInapplicable {
            reason: format!(
                "J^2 = {} differs from hbar^2 Gamma_1 Gamma_L = {}",
                params.j * params.j,
                params.hbar * params.hbar * params.gamma_1 * params.gamma_l
            ),
        });
    }
    if params.j == 0.0 || params.gamma_1 == 0.0 {
        return Err(Error::ClosedFormInapplicable {
            reason: "J and Gamma_1 must be nonzero".into(),
        });
    }
    Ok(())
}

fn rapidity(params: &XxChainParams, theta: Complex64) -> Complex64 {
    -I * (params.h_z + params.j.abs() * theta.cos()) / params.hbar
}

fn complete_by_trace(params: &XxChainParams, mut lambdas: Vec<Complex64>) -> Vec<Complex64> {
    let rest: Complex64 = lambdas.iter().sum();
    lambdas.push(trace_p(params) - rest);
    lambdas
}

/// Closed-form rapidities with the trace-completed last value.
pub fn analytic_rapidities(params: &XxChainParams) -> Result<AnalyticSpectrum> {
    check_applicable(params)?;
    let l = params.sites;
    let kappa = (params.j / (params.hbar * params.gamma_1)).powi(2);
    let x = 2.0 * kappa.sqrt() / (kappa + 1.0);
    let mut alphas = Vec::with_capacity(l.saturating_sub(1));
    let mut betas = Vec::with_capacity(l.saturating_sub(1));
    let mut lambdas = Vec::with_capacity(l);
    for k in 1..l {
        let alpha = k as f64 * std::f64::consts::PI / l as f64;
        let s = x * alpha.sin();
        if 1.0 - s <= DIVERGENCE_MARGIN {
            return Err(Error::DivergentBeta { k, sites: l });
        }
        let beta = ((1.0 + s) / (1.0 - s)).ln() / (2.0 * l as f64);
        alphas.push(alpha);
        betas.push(beta);
        lambdas.push(rapidity(params, Complex64::new(alpha, beta)));
    }
    Ok(AnalyticSpectrum {
        kappa,
        alphas,
        betas,
        lambdas: complete_by_trace(params, lambdas),
        condition_satisfied: true,
    })
}

const NEWTON_MAX_ITER: usize = 100;

/// Exact rapidities from the secular equation, seeded by the closed form.
pub fn refined_rapidities(params: &XxChainParams) -> Result<Vec<Complex64>> {
    let spectrum = analytic_rapidities(params)?;
    let l = params.sites as f64;
    let s = I * params.hbar * (params.gamma_1 + params.gamma_l) / params.j.abs();
    let f = |t: Complex64| 2.0 * (l * t).cos() * t.sin() + s * (l * t).sin();
    let df = |t: Complex64| {
        -2.0 * l * (l * t).sin() * t.sin() + 2.0 * (l * t).cos() * t.cos() + s * l * (l * t).cos()
    };
    let mut lambdas = Vec::with_capacity(params.sites);
    for (idx, (&alpha, &beta)) in spectrum.alphas.iter().zip(&spectrum.betas).enumerate() {
        let mut t = Complex64::new(alpha, beta);
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let step = f(t) / df(t);
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            t -= step;
            if step.norm() <= 4.0 * f64::EPSILON * t.norm().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::RefinementFailed { k: idx + 1 });
        }
        lambdas.push(rapidity(params, t));
    }
    Ok(complete_by_trace(params, lambdas))
}

#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub max_deviation: f64,
    pub collisions: usize,
    #[serde(serialize_with = "serialize_complex_vec")]
    pub closed_form: Vec<Complex64>,
    #[serde(serialize_with = "serialize_complex_vec")]
    pub numeric: Vec<Complex64>,
}

fn compare(
    params: &XxChainParams,
    closed_form: Vec<Complex64>,
    tol: &Tolerances,
) -> Result<Comparison> {
    let model = params.model()?;
    let spectral = SpectralData::from_model(&model, tol)?;
    let m = linalg::match_multisets(&closed_form, &spectral.rapidities)?;
    Ok(Comparison {
        max_deviation: m.max_deviation,
        collisions: m.collisions,
        closed_form,
        numeric: spectral.rapidities,
    })
}

/// Closed form against the dense eigensolve.
pub fn compare_analytic_numeric(params: &XxChainParams, tol: &Tolerances) -> Result<Comparison> {
    let closed = analytic_rapidities(params)?.lambdas;
    compare(params, closed, tol)
}

/// Secular-equation roots against the dense eigensolve.
pub fn compare_refined_numeric(params: &XxChainParams, tol: &Tolerances) -> Result<Comparison> {
    let refined = refined_rapidities(params)?;
    compare(params, refined, tol)
}
