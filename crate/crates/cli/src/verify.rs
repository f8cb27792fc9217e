use anyhow::Result;
use quadlind::dynamics::{evolve_covariance, linspace, spectral_gap};
use quadlind::linalg::{self, match_into};
use quadlind::oracle::{
    build_liouvillian_superoperator, ed_evolve, ed_steady_state, gaussian_density_matrix,
    predicted_even_spectrum, MAX_PREDICTION_SITES, MAX_TRAJECTORY_SITES,
};
use quadlind::random::{random_gaussian_correlation, rng};
use quadlind::spectral::{pairing_deviation, similarity_round_trip};
use quadlind::structure::{build_m, build_p, dissipation_residual};
use quadlind::{
    assemble_w1, check_m_symmetry, similarity_log, solve, summing_rule_residual, Tolerances,
};
use serde::Serialize;
use serde_json::json;

use crate::cli::Common;
use crate::output::{sci, Report, Table};
use crate::source::load_model;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

fn check(name: &'static str, value: f64, threshold: f64) -> Check {
    Check {
        name,
        value,
        threshold,
        pass: value <= threshold,
    }
}

/// Runs every residual check; the oracle ones only up to `--lmax-oracle`.
pub fn verify(common: &Common, tol: &Tolerances) -> Result<(Report, bool)> {
    let model = load_model(common, tol)?;
    let sites = model.sites();
    let (spectral, ss) = solve(&model, tol)?;
    let m = build_m(&model);
    let p = build_p(&model);
    let scale = model.total_dissipation().max(1.0);
    let lp = linalg::max_norm(model.lambda_plus()).max(1.0);

    let mut checks = vec![
        check("m_symmetry", check_m_symmetry(&m), 1e-12 * scale),
        check(
            "p_dissipation",
            dissipation_residual(&p, &model),
            1e-12 * scale,
        ),
        check("pairing", pairing_deviation(&spectral, &m)?, 1e-10 * scale),
        check(
            "summing_rule",
            summing_rule_residual(&spectral, &model),
            1e-10 * scale,
        ),
        check("eigen_residual", spectral.eigen_residual, 1e-10 * scale),
        check("lyapunov", ss.lyapunov_residual, 1e-10 * lp),
        check("o_hermitian", linalg::hermitian_violation(&ss.o), 1e-10),
    ];
    match assemble_w1(&spectral, &ss.q, tol) {
        Ok(asm) => {
            checks.push(check("w1_inverse", asm.inverse_residual(), 1e-8));
            checks.push(check(
                "w1_diagonalizes_m",
                asm.diagonalization_residual(&m, &spectral),
                1e-8,
            ));
            let log = similarity_log(&asm.w1, tol)?;
            checks.push(check(
                "similarity_round_trip",
                similarity_round_trip(&asm.w1, &log.w),
                1e-8,
            ));
        }
        Err(e) => eprintln!("warning: W1 checks skipped: {e}"),
    }

    let mut skipped = Vec::new();
    if sites <= common.lmax_oracle {
        let so = build_liouvillian_superoperator(&model, common.lmax_oracle)?;
        let mut r = rng(common.seed);
        checks.push(check(
            "oracle_trace_preservation",
            so.trace_residual(),
            1e-10 * scale,
        ));
        checks.push(check(
            "oracle_hermiticity_preservation",
            so.hermiticity_residual(&mut r, 3),
            1e-10 * scale,
        ));
        checks.push(check("oracle_sector_coupling", so.sector_coupling(), 1e-12));
        let ed = ed_steady_state(&so)?;
        checks.push(check(
            "oracle_steady_state",
            linalg::max_abs_diff(&ss.o, &ed.o),
            1e-8,
        ));
        if sites <= MAX_PREDICTION_SITES {
            let predicted = predicted_even_spectrum(&spectral)?;
            let containment = match_into(&predicted, &so.spectrum()?)?.max_deviation;
            checks.push(check(
                "oracle_even_spectrum",
                containment,
                1e-8 * spectral.max_abs().max(1.0),
            ));
        }
        if sites <= MAX_TRAJECTORY_SITES {
            let gap = spectral_gap(&spectral)?;
            let times = linspace(10.0 / gap, 11);
            let c0 = random_gaussian_correlation(&mut r, sites);
            let ours = evolve_covariance(&model, &c0, &times, tol)?;
            let rho0 = gaussian_density_matrix(&so.operators, &c0)?;
            let theirs = ed_evolve(&so, &rho0, &times)?;
            let err = ours
                .covariances
                .iter()
                .zip(&theirs)
                .map(|(a, b)| linalg::max_abs_diff(a, b))
                .fold(0.0, f64::max);
            checks.push(check("oracle_trajectory", err, 1e-6));
        } else {
            skipped.push("oracle_trajectory");
        }
    } else {
        skipped.push("oracle (L exceeds --lmax-oracle)");
    }

    let mut table = Table::new(["check", "value", "threshold", "result"]);
    for c in &checks {
        let result = if c.pass { "pass" } else { "FAIL" };
        table.push(vec![
            c.name.into(),
            sci(c.value).into(),
            sci(c.threshold).into(),
            result.into(),
        ]);
    }
    let all_passed = checks.iter().all(|c| c.pass);
    let failed = checks.iter().filter(|c| !c.pass).count();
    let mut notes = vec![format!("{} checks, {failed} failed", checks.len())];
    if !skipped.is_empty() {
        notes.push(format!("skipped: {}", skipped.join(", ")));
    }
    let summary = json!({
        "command": "verify",
        "L": sites,
        "hbar": model.hbar(),
        "seed": common.seed,
        "checks": checks,
        "skipped": skipped,
        "all_passed": all_passed,
    });
    let report = Report {
        title: format!("verify: L = {sites}, hbar = {}", model.hbar()),
        table,
        summary,
        notes,
    };
    Ok((report, all_passed))
}
