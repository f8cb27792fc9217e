//! Rapidities of `P`, the paired spectrum of `M`, and the transformation
//! `W₁` that diagonalizes `M`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::model::{Tolerances, ValidatedModel};
use crate::structure::build_p;

/// Eigendecomposition `P W_P = W_P diag(λ)` in a fixed order and gauge.
///
/// Rapidities are sorted by imaginary part and, within a cluster of equal
/// imaginary parts, by real part. Each eigenvector has unit 2-norm and its
/// first significant component real and positive.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub rapidities: Vec<Complex64>,
    pub w_p: CMat,
    /// 2-norm condition number of `W_P`.
    pub condition_estimate: f64,
    /// Index pairs `(i, j)`, `i <= j`, with `λ_i + λ_j*` numerically zero.
    pub degenerate_pairs: Vec<(usize, usize)>,
    /// Set when `condition_estimate` exceeds the configured threshold.
    pub low_confidence: bool,
    /// `max|P W - W Λ|`.
    pub eigen_residual: f64,
    /// `tol_gap` used for the degenerate-pair test.
    pub gap_tolerance: f64,
}

impl SpectralData {
    pub fn from_model(model: &ValidatedModel, tol: &Tolerances) -> Result<Self> {
        rapidities(&build_p(model), tol)
    }

    pub fn sites(&self) -> usize {
        self.rapidities.len()
    }

    pub fn max_abs(&self) -> f64 {
        self.rapidities.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_real(&self) -> f64 {
        self.rapidities
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_marginal(&self) -> bool {
        !self.degenerate_pairs.is_empty()
    }
}

/// Relative width of an imaginary-part cluster in the rapidity order.
const TIE_RELATIVE: f64 = 1e-10;
/// Components below this fraction of the largest one never fix the gauge.
const GAUGE_RELATIVE: f64 = 1e-8;

fn sort_order(values: &[Complex64]) -> Vec<usize> {
    let scale = values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tie = TIE_RELATIVE * scale;
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].im.total_cmp(&values[b].im).then(a.cmp(&b)));
    let mut out = Vec::with_capacity(idx.len());
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]].im - values[idx[end - 1]].im <= tie {
            end += 1;
        }
        let mut cluster = idx[start..end].to_vec();
        cluster.sort_by(|&a, &b| {
            values[a]
                .re
                .total_cmp(&values[b].re)
                .then_with(|| values[a].im.total_cmp(&values[b].im))
        });
        out.extend(cluster);
        start = end;
    }
    out
}

fn fix_gauge(w: &mut CMat) {
    for j in 0..w.ncols() {
        let norm = (0..w.nrows())
            .map(|i| w[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if norm == 0.0 {
            continue;
        }
        let big = (0..w.nrows()).map(|i| w[(i, j)].norm()).fold(0.0, f64::max);
        let pivot = (0..w.nrows())
            .find(|&i| w[(i, j)].norm() > GAUGE_RELATIVE * big)
            .unwrap_or(0);
        let z = w[(pivot, j)];
        let phase = z.conj() / z.norm();
        for i in 0..w.nrows() {
            w[(i, j)] = w[(i, j)] * phase / norm;
        }
        w[(pivot, j)] = Complex64::new(w[(pivot, j)].norm(), 0.0);
    }
}

/// Rapidities and right eigenvectors of `P`.
pub fn rapidities(p: &CMat, tol: &Tolerances) -> Result<SpectralData> {
    let n = p.nrows();
    let (values, vectors) = linalg::eig(p)?;
    let order = sort_order(&values);
    let rapidities: Vec<Complex64> = order.iter().map(|&k| values[k]).collect();
    let mut w_p = CMat::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    fix_gauge(&mut w_p);

    let mut resid = p * &w_p;
    for j in 0..n {
        for i in 0..n {
            resid[(i, j)] -= w_p[(i, j)] * rapidities[j];
        }
    }
    let eigen_residual = linalg::max_norm(&resid);
    let condition_estimate = linalg::condition_number(&w_p)?;

    let scale = rapidities.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let gap_tolerance = tol.gap_relative * scale;
    let mut degenerate_pairs = Vec::new();
    for i in 0..n {
        for j in i..n {
            if (rapidities[i] + rapidities[j].conj()).norm() <= gap_tolerance {
                degenerate_pairs.push((i, j));
            }
        }
    }

    Ok(SpectralData {
        rapidities,
        w_p,
        condition_estimate,
        degenerate_pairs,
        low_confidence: condition_estimate.is_nan() || condition_estimate > tol.condition_threshold,
        eigen_residual,
        gap_tolerance,
    })
}

/// The `2L` eigenvalues of `M`: the rapidities followed by `-λ*`.
pub fn full_spectrum(spectral: &SpectralData) -> Vec<Complex64> {
    let r = &spectral.rapidities;
    r.iter()
        .copied()
        .chain(r.iter().map(|z| -z.conj()))
        .collect()
}

/// Max deviation between `full_spectrum` and a direct eigensolve of `M`.
pub fn pairing_deviation(spectral: &SpectralData, m: &CMat) -> Result<f64> {
    let direct = linalg::eigenvalues(m)?;
    Ok(linalg::match_multisets(&full_spectrum(spectral), &direct)?.max_deviation)
}

/// `|Σ 2 Re λ + tr(Λ⁺ + Λ⁻ᵗ)|`.
pub fn summing_rule_residual(spectral: &SpectralData, model: &ValidatedModel) -> f64 {
    let sum: f64 = spectral.rapidities.iter().map(|z| 2.0 * z.re).sum();
    (sum + model.total_dissipation()).abs()
}

/// `W₁` and its block inverse for a Hermitian `Q`.
#[derive(Debug, Clone)]
pub struct W1Assembly {
    pub q: CMat,
    pub c: CMat,
    pub d: CMat,
    pub w1: CMat,
    pub w1_inv: CMat,
}

impl W1Assembly {
    /// `W₂ = (W₁ᵗ)⁻¹`.
    pub fn w2(&self) -> CMat {
        linalg::transpose(&self.w1_inv)
    }

    /// `max|W₁⁻¹ W₁ - 1|`.
    pub fn inverse_residual(&self) -> f64 {
        let n = self.w1.nrows();
        linalg::max_abs_diff(&(&self.w1_inv * &self.w1), &linalg::identity(n))
    }

    /// `max|W₁⁻¹ M W₁ - diag(λ, -λ*)|`.
    pub fn diagonalization_residual(&self, m: &CMat, spectral: &SpectralData) -> f64 {
        let d = &self.w1_inv * m * &self.w1;
        linalg::max_abs_diff(&d, &linalg::from_diagonal(&full_spectrum(spectral)))
    }
}

/// Assembles `W₁ = [[W, WQ], [-W, -WQ - W^{-†}]]` and
/// `W₁⁻¹ = [[-D†, C†], [-W†, -W†]]` with `C = WQ`, `D = -C - W^{-†}`.
pub fn assemble_w1(spectral: &SpectralData, q: &CMat, tol: &Tolerances) -> Result<W1Assembly> {
    if spectral.condition_estimate.is_nan() || spectral.condition_estimate > tol.condition_threshold
    {
        return Err(Error::IllConditioned {
            condition: spectral.condition_estimate,
            threshold: tol.condition_threshold,
        });
    }
    let n = spectral.sites();
    if q.nrows() != n || q.ncols() != n {
        return Err(Error::Dimension {
            name: "Q",
            rows: q.nrows(),
            cols: q.ncols(),
            expected: n,
        });
    }
    let w = &spectral.w_p;
    let w_inv_adj = linalg::adjoint(&linalg::inverse(w));
    let c = w * q;
    let d = -&c - &w_inv_adj;
    let minus_w = -w;
    let w_adj = linalg::adjoint(w);
    let minus_w_adj = -&w_adj;
    let w1 = linalg::block2x2(w, &c, &minus_w, &d);
    let w1_inv = linalg::block2x2(
        &(-linalg::adjoint(&d)),
        &linalg::adjoint(&c),
        &minus_w_adj,
        &minus_w_adj,
    );
    Ok(W1Assembly {
        q: q.clone(),
        c,
        d,
        w1,
        w1_inv,
    })
}

/// `W = -log W₁` through the eigendecomposition of `W₁`.
#[derive(Debug, Clone)]
pub struct SimilarityLog {
    pub w: CMat,
    /// Eigenvalues of `W₁` on the negative real axis; their logarithm is
    /// taken with imaginary part `+π`.
    pub branch_cut_count: usize,
    pub condition: f64,
}

/// Eigenvalues within this relative distance of the negative real axis
/// are treated as lying on it.
const BRANCH_RELATIVE: f64 = 1e-12;

pub fn similarity_log(w1: &CMat, tol: &Tolerances) -> Result<SimilarityLog> {
    let (values, v) = linalg::eig(w1)?;
    let condition = linalg::condition_number(&v)?;
    if condition.is_nan() || condition > tol.condition_threshold {
        return Err(Error::IllConditioned {
            condition,
            threshold: tol.condition_threshold,
        });
    }
    let scale = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut branch_cut_count = 0;
    let mut logs = Vec::with_capacity(values.len());
    for z in &values {
        if z.norm() <= f64::EPSILON * scale.max(1.0) {
            return Err(Error::LogUndefined {
                reason: "W1 is singular".into(),
            });
        }
        if z.re < 0.0 && z.im.abs() <= BRANCH_RELATIVE * z.norm() {
            branch_cut_count += 1;
            logs.push(Complex64::new(z.norm().ln(), PI));
        } else {
            logs.push(z.ln());
        }
    }
    let v_inv = linalg::inverse(&v);
    let w = -(&v * linalg::from_diagonal(&logs) * &v_inv);
    Ok(SimilarityLog {
        w,
        branch_cut_count,
        condition,
    })
}

/// `max|exp(-W) - W₁|`.
pub fn similarity_round_trip(w1: &CMat, w: &CMat) -> f64 {
    linalg::max_abs_diff(&linalg::expm(&(-w)), w1)
}

/// Compact summary for reports.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary {
    pub rapidities: Vec<[f64; 2]>,
    pub condition_estimate: f64,
    pub low_confidence: bool,
    pub degenerate_pairs: Vec<(usize, usize)>,
    pub eigen_residual: f64,
}

impl From<&SpectralData> for SpectrumSummary {
    fn from(s: &SpectralData) -> Self {
        SpectrumSummary {
            rapidities: s.rapidities.iter().map(|z| [z.re, z.im]).collect(),
            condition_estimate: s.condition_estimate,
            low_confidence: s.low_confidence,
            degenerate_pairs: s.degenerate_pairs.clone(),
            eigen_residual: s.eigen_residual,
        }
    }
}
