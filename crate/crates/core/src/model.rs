//! Problem specifications: the quadratic Hamiltonian `h`, the gain and loss
//! matrices `Λ⁺`/`Λ⁻`, and the boundary-driven XX chain that maps onto them
//! through the Jordan–Wigner transformation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, ZERO};

/// Numerical tolerances shared by validation and the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed `max|A - A^H|`, relative to `max|A|`.
    pub hermitian: f64,
    /// Allowed negative eigenvalue of `Λ±`, relative to `max|Λ±|`.
    pub psd: f64,
    /// `|λ_i + λ_j*|` below `gap_relative * max|λ|` counts as marginal.
    pub gap_relative: f64,
    /// Eigenvector-matrix condition number above which results are low confidence.
    pub condition_threshold: f64,
    /// Slack on occupation eigenvalues outside `[0, 1]`.
    pub occupation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermitian: 1e-10,
            psd: 1e-10,
            gap_relative: 1e-12,
            condition_threshold: 1e8,
            occupation: 1e-8,
        }
    }
}

/// Unvalidated problem description `(h, Λ⁺, Λ⁻, ħ)`.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub h: CMat,
    pub lambda_plus: CMat,
    pub lambda_minus: CMat,
    pub hbar: f64,
}

impl ModelSpec {
    pub fn new(h: CMat, lambda_plus: CMat, lambda_minus: CMat) -> Self {
        ModelSpec {
            h,
            lambda_plus,
            lambda_minus,
            hbar: 1.0,
        }
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn validate(self) -> Result<ValidatedModel> {
        validate_model(self, &Tolerances::default())
    }
}

/// A model whose Hermiticity and positivity assumptions have been certified.
///
/// Immutable after construction; the stored matrices are the Hermitian
/// parts of the inputs.
#[derive(Debug, Clone)]
pub struct ValidatedModel {
    h: CMat,
    lambda_plus: CMat,
    lambda_minus: CMat,
    hbar: f64,
    chain: Option<XxChainParams>,
}

impl ValidatedModel {
    pub fn sites(&self) -> usize {
        self.h.nrows()
    }
    pub fn h(&self) -> &CMat {
        &self.h
    }
    pub fn lambda_plus(&self) -> &CMat {
        &self.lambda_plus
    }
    pub fn lambda_minus(&self) -> &CMat {
        &self.lambda_minus
    }
    pub fn hbar(&self) -> f64 {
        self.hbar
    }
    /// Chain parameters when the model was built by [`build_xx_chain`].
    pub fn chain(&self) -> Option<&XxChainParams> {
        self.chain.as_ref()
    }

    /// `tr(Λ⁺ + Λ⁻ᵗ)`, real for valid models.
    pub fn total_dissipation(&self) -> f64 {
        (linalg::trace(&self.lambda_plus) + linalg::trace(&self.lambda_minus)).re
    }

    pub fn to_spec(&self) -> ModelSpec {
        ModelSpec {
            h: self.h.clone(),
            lambda_plus: self.lambda_plus.clone(),
            lambda_minus: self.lambda_minus.clone(),
            hbar: self.hbar,
        }
    }
}

fn check_square(name: &'static str, a: &CMat, expected: usize) -> Result<()> {
    if a.nrows() != expected || a.ncols() != expected {
        return Err(Error::Dimension {
            name,
            rows: a.nrows(),
            cols: a.ncols(),
            expected,
        });
    }
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let z = a[(i, j)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::Format(format!("{name}[{i}][{j}] is not finite")));
            }
        }
    }
    Ok(())
}

fn check_hermitian(name: &'static str, a: &CMat, tol: f64) -> Result<()> {
    let violation = linalg::hermitian_violation(a);
    let tolerance = tol * linalg::max_norm(a);
    if violation > tolerance {
        return Err(Error::NotHermitian {
            name,
            violation,
            tolerance,
        });
    }
    Ok(())
}

fn check_psd(name: &'static str, a: &CMat, tol: f64) -> Result<()> {
    let tolerance = tol * linalg::max_norm(a);
    let min_eigenvalue = linalg::hermitian_eigenvalues(a)?
        .first()
        .copied()
        .unwrap_or(0.0);
    if min_eigenvalue < -tolerance {
        return Err(Error::NotPositiveSemidefinite {
            name,
            min_eigenvalue,
            tolerance,
        });
    }
    Ok(())
}

/// Certifies a raw model: square matrices of one size `L >= 1`, Hermitian
/// `h`, Hermitian positive-semidefinite `Λ±`, positive `ħ`.
pub fn validate_model(spec: ModelSpec, tol: &Tolerances) -> Result<ValidatedModel> {
    let sites = spec.h.nrows();
    if sites == 0 {
        return Err(Error::InvalidParameter {
            name: "L",
            value: 0.0,
            reason: "at least one site is required",
        });
    }
    check_square("h", &spec.h, sites)?;
    check_square("lambda_plus", &spec.lambda_plus, sites)?;
    check_square("lambda_minus", &spec.lambda_minus, sites)?;
    if !(spec.hbar.is_finite() && spec.hbar > 0.0) {
        return Err(Error::InvalidParameter {
            name: "hbar",
            value: spec.hbar,
            reason: "must be positive and finite",
        });
    }
    check_hermitian("h", &spec.h, tol.hermitian)?;
    check_hermitian("lambda_plus", &spec.lambda_plus, tol.hermitian)?;
    check_hermitian("lambda_minus", &spec.lambda_minus, tol.hermitian)?;
    check_psd("lambda_plus", &spec.lambda_plus, tol.psd)?;
    check_psd("lambda_minus", &spec.lambda_minus, tol.psd)?;
    Ok(ValidatedModel {
        h: linalg::hermitian_part(&spec.h),
        lambda_plus: linalg::hermitian_part(&spec.lambda_plus),
        lambda_minus: linalg::hermitian_part(&spec.lambda_minus),
        hbar: spec.hbar,
        chain: None,
    })
}

/// Physical parameters of the boundary-driven XX chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XxChainParams {
    #[serde(rename = "L")]
    pub sites: usize,
    #[serde(rename = "J")]
    pub j: f64,
    pub h_z: f64,
    #[serde(rename = "Gamma_1")]
    pub gamma_1: f64,
    #[serde(rename = "Gamma_L")]
    pub gamma_l: f64,
    pub nbar_1: f64,
    #[serde(rename = "nbar_L")]
    pub nbar_l: f64,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
}

fn default_hbar() -> f64 {
    1.0
}

impl XxChainParams {
    pub fn new(sites: usize, j: f64, h_z: f64, gamma_1: f64, gamma_l: f64) -> Self {
        XxChainParams {
            sites,
            j,
            h_z,
            gamma_1,
            gamma_l,
            nbar_1: 0.5,
            nbar_l: 0.5,
            hbar: 1.0,
        }
    }

    pub fn with_fillings(mut self, nbar_1: f64, nbar_l: f64) -> Self {
        self.nbar_1 = nbar_1;
        self.nbar_l = nbar_l;
        self
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |name, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "must be finite",
                })
            }
        };
        if self.sites == 0 {
            return Err(Error::InvalidParameter {
                name: "L",
                value: 0.0,
                reason: "at least one site is required",
            });
        }
        finite("J", self.j)?;
        finite("h_z", self.h_z)?;
        for (name, g) in [("Gamma_1", self.gamma_1), ("Gamma_L", self.gamma_l)] {
            finite(name, g)?;
            if g < 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value: g,
                    reason: "boundary rate must be nonnegative",
                });
            }
        }
        for (name, n) in [("nbar_1", self.nbar_1), ("nbar_L", self.nbar_l)] {
            if !(0.0..=1.0).contains(&n) {
                return Err(Error::InvalidParameter {
                    name,
                    value: n,
                    reason: "bath filling must lie in [0, 1]",
                });
            }
        }
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(Error::InvalidParameter {
                name: "hbar",
                value: self.hbar,
                reason: "must be positive and finite",
            });
        }
        Ok(())
    }

    /// Gain and loss rates `(Λ⁺, Λ⁻)` at the first and last site.
    pub fn boundary_rates(&self) -> [(f64, f64); 2] {
        [
            (
                self.nbar_1 * self.gamma_1,
                (1.0 - self.nbar_1) * self.gamma_1,
            ),
            (
                self.nbar_l * self.gamma_l,
                (1.0 - self.nbar_l) * self.gamma_l,
            ),
        ]
    }

    /// Validated model for these parameters.
    pub fn model(&self) -> Result<ValidatedModel> {
        let mut m = build_xx_chain(self)?.validate()?;
        m.chain = Some(*self);
        Ok(m)
    }
}

/// Jordan–Wigner image of the XX chain: `h` tridiagonal with `2h_z` on the
/// diagonal and `J` next to it; `Λ±` nonzero only at the two ends.
pub fn build_xx_chain(params: &XxChainParams) -> Result<ModelSpec> {
    params.validate()?;
    let n = params.sites;
    let h = CMat::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(2.0 * params.h_z, 0.0)
        } else if i.abs_diff(j) == 1 {
            Complex64::new(params.j, 0.0)
        } else {
            ZERO
        }
    });
    let mut lambda_plus = linalg::zeros(n, n);
    let mut lambda_minus = linalg::zeros(n, n);
    let [(gain_1, loss_1), (gain_l, loss_l)] = params.boundary_rates();
    lambda_plus[(0, 0)] += Complex64::new(gain_1, 0.0);
    lambda_minus[(0, 0)] += Complex64::new(loss_1, 0.0);
    lambda_plus[(n - 1, n - 1)] += Complex64::new(gain_l, 0.0);
    lambda_minus[(n - 1, n - 1)] += Complex64::new(loss_l, 0.0);
    Ok(ModelSpec {
        h,
        lambda_plus,
        lambda_minus,
        hbar: params.hbar,
    })
}

/// Recovers `(Γ, n̄)` at one boundary site from the emitted rates.
/// `n̄` is `None` for a closed end (`Γ = 0`).
pub fn recover_boundary(model: &ValidatedModel, site: usize) -> (f64, Option<f64>) {
    let gain = model.lambda_plus()[(site, site)].re;
    let loss = model.lambda_minus()[(site, site)].re;
    let gamma = gain + loss;
    let nbar = (gamma > 0.0).then(|| gain / gamma);
    (gamma, nbar)
}
