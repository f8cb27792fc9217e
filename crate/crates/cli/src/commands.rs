use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use quadlind::dynamics::{evolve_covariance, linspace, spectral_gap, EvolutionSummary};
use quadlind::io::{matrix_from_json, matrix_to_json, MatrixJson};
use quadlind::linalg::{self, match_multisets, CMat};
use quadlind::random::random_model;
use quadlind::spectral::{pairing_deviation, SpectrumSummary};
use quadlind::structure::build_m;
use quadlind::xx::{analytic_rapidities, refined_rapidities};
use quadlind::{
    check_m_symmetry, solve, summing_rule_residual, Complex64, Error, SpectralData, Tolerances,
    ValidatedModel,
};
use serde_json::json;

use crate::cli::{Common, Initial};
use crate::output::{sci, Cell, Report, Table};
use crate::source::{load_chain, load_model};

fn header(name: &str, model: &ValidatedModel) -> String {
    format!("{name}: L = {}, hbar = {}", model.sites(), model.hbar())
}

fn pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn spectrum(common: &Common, tol: &Tolerances) -> Result<Report> {
    let model = load_model(common, tol)?;
    let spectral = SpectralData::from_model(&model, tol)?;
    let m = build_m(&model);
    let pairing = pairing_deviation(&spectral, &m)?;
    let symmetry = check_m_symmetry(&m);
    let summing = summing_rule_residual(&spectral, &model);
    let gap = spectral_gap(&spectral).ok();

    let mut table = Table::new(["k", "rapidity_re", "rapidity_im"]);
    for (k, z) in spectral.rapidities.iter().enumerate() {
        table.push(vec![Cell::from(k + 1), Cell::from(z.re), Cell::from(z.im)]);
    }
    let mut notes = vec![format!(
        "gap {}  cond(W_P) {}  pairing {}  symmetry {}  summing rule {}",
        gap.map(sci).unwrap_or_else(|| "none (marginal)".into()),
        sci(spectral.condition_estimate),
        sci(pairing),
        sci(symmetry),
        sci(summing)
    )];
    if spectral.low_confidence {
        notes
            .push("warning: eigenbasis of P is ill-conditioned; results are low confidence".into());
    }
    let summary = json!({
        "command": "spectrum",
        "L": model.sites(),
        "hbar": model.hbar(),
        "spectrum": SpectrumSummary::from(&spectral),
        "gap": gap,
        "pairing_deviation": pairing,
        "m_symmetry_residual": symmetry,
        "summing_rule_residual": summing,
    });
    Ok(Report {
        title: header("spectrum", &model),
        table,
        summary,
        notes,
    })
}

pub fn steady(common: &Common, tol: &Tolerances) -> Result<Report> {
    let model = load_model(common, tol)?;
    let (spectral, ss) = solve(&model, tol)?;
    let mut table = Table::new(["site", "occupation", "current"]);
    for (l, n) in ss.occupations.iter().enumerate() {
        let current = ss.currents.as_ref().and_then(|c| c.get(l).copied());
        table.push(vec![Cell::from(l + 1), Cell::from(*n), Cell::from(current)]);
    }
    let mut notes = vec![format!(
        "lyapunov residual {}  method {:?}",
        sci(ss.lyapunov_residual),
        ss.method
    )];
    if let Some(spread) = ss.current_spread() {
        notes.push(format!("current spread {}", sci(spread)));
    }
    if spectral.low_confidence {
        notes
            .push("warning: eigenbasis of P is ill-conditioned; results are low confidence".into());
    }
    let summary = json!({
        "command": "steady",
        "L": model.sites(),
        "hbar": model.hbar(),
        "occupations": ss.occupations,
        "currents": ss.currents,
        "current_spread": ss.current_spread(),
        "o": matrix_to_json(&ss.o),
        "lyapunov_residual": ss.lyapunov_residual,
        "q_hermitian_violation": ss.q_hermitian_violation,
        "method": format!("{:?}", ss.method).to_lowercase(),
        "low_confidence": spectral.low_confidence,
    });
    Ok(Report {
        title: header("steady", &model),
        table,
        summary,
        notes,
    })
}

fn initial_state(sites: usize, initial: Initial, c0: Option<&Path>) -> Result<CMat> {
    if let Some(path) = c0 {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let rows: MatrixJson =
            serde_json::from_str(&text).map_err(|e| Error::InvalidInitialState {
                reason: e.to_string(),
            })?;
        return Ok(matrix_from_json("C0", &rows, sites)?);
    }
    let fill = |l: usize| match initial {
        Initial::Empty => 0.0,
        Initial::Full => 1.0,
        Initial::Domain => f64::from(u8::from(l < sites.div_ceil(2))),
    };
    let diag: Vec<Complex64> = (0..sites).map(|l| Complex64::new(fill(l), 0.0)).collect();
    Ok(linalg::from_diagonal(&diag))
}

pub fn evolve(
    common: &Common,
    tol: &Tolerances,
    t_max: Option<f64>,
    steps: usize,
    initial: Initial,
    c0: Option<&Path>,
) -> Result<Report> {
    let model = load_model(common, tol)?;
    let spectral = SpectralData::from_model(&model, tol)?;
    let t_max = match (t_max, spectral_gap(&spectral)) {
        (Some(t), _) => t,
        (None, Ok(gap)) => 10.0 / gap,
        (None, Err(e)) => bail!("{e}; pass --t-max explicitly"),
    };
    if steps < 2 {
        bail!("--steps must be at least 2");
    }
    let c0 = initial_state(model.sites(), initial, c0)?;
    let result = evolve_covariance(&model, &c0, &linspace(t_max, steps), tol)?;
    let summary = EvolutionSummary::from(&result);

    let mut headers = vec!["t".to_string()];
    headers.extend((1..=model.sites()).map(|l| format!("n_{l}")));
    let mut table = Table::new(headers);
    for (t, occ) in summary.times.iter().zip(&summary.occupations) {
        let mut row = vec![Cell::from(*t)];
        row.extend(occ.iter().map(|&n| Cell::from(n)));
        table.push(row);
    }

    let steady = if result.marginal {
        None
    } else {
        solve(&model, tol).ok()
    };
    let final_deviation = steady.as_ref().map(|(_, ss)| {
        linalg::max_abs_diff(
            result.covariances.last().expect("at least two times"),
            &ss.o,
        )
    });
    let mut notes = vec![format!(
        "gap {}  final max|C(t) - O| {}",
        result
            .gap
            .map(sci)
            .unwrap_or_else(|| "none (marginal)".into()),
        final_deviation.map(sci).unwrap_or_default()
    )];
    if result.marginal {
        notes.push("warning: marginal model; the state need not relax".into());
    }
    if result.low_confidence {
        notes.push(
            "warning: propagated with the matrix exponential; eigenbasis ill-conditioned".into(),
        );
    }
    let summary = json!({
        "command": "evolve",
        "L": model.sites(),
        "hbar": model.hbar(),
        "evolution": summary,
        "final_covariance": matrix_to_json(result.covariances.last().expect("at least two times")),
        "final_deviation_from_steady": final_deviation,
        "low_confidence": result.low_confidence,
    });
    Ok(Report {
        title: header("evolve", &model),
        table,
        summary,
        notes,
    })
}

pub fn xx_compare(common: &Common, tol: &Tolerances) -> Result<Report> {
    let params = load_chain(common, tol)?;
    let model = params.model()?;
    let spectral = SpectralData::from_model(&model, tol)?;
    let numeric = &spectral.rapidities;

    let mut notes = Vec::new();
    let analytic = match analytic_rapidities(&params) {
        Ok(a) => Some(a),
        Err(e @ Error::DivergentBeta { .. }) => {
            eprintln!("warning: {e}; closed form refused, reporting the numerical spectrum only");
            notes.push(format!("closed form refused: {e}"));
            None
        }
        Err(e) => return Err(e.into()),
    };
    let refined = match analytic.as_ref().map(|_| refined_rapidities(&params)) {
        Some(Ok(r)) => Some(r),
        Some(Err(e)) => {
            eprintln!("warning: {e}");
            None
        }
        None => None,
    };

    let mut table = Table::new([
        "k",
        "closed_re",
        "closed_im",
        "refined_re",
        "refined_im",
        "numeric_re",
        "numeric_im",
        "closed_deviation",
    ]);
    let mut closed_dev = None;
    let mut refined_dev = None;
    match &analytic {
        Some(a) => {
            let m = match_multisets(&a.lambdas, numeric)?;
            closed_dev = Some(m.max_deviation);
            let refined_pairs = match &refined {
                Some(r) => {
                    let rm = match_multisets(r, numeric)?;
                    refined_dev = Some(rm.max_deviation);
                    Some(rm.pairs)
                }
                None => None,
            };
            // refined roots are matched back to the closed-form row sharing their numeric partner
            let mut refined_for_numeric = vec![None; numeric.len()];
            if let (Some(r), Some(p)) = (&refined, &refined_pairs) {
                for (i, &j) in p.iter().enumerate() {
                    refined_for_numeric[j] = Some(r[i]);
                }
            }
            for (k, (&z, &j)) in a.lambdas.iter().zip(&m.pairs).enumerate() {
                let w = numeric[j];
                let r: Option<Complex64> = refined_for_numeric[j];
                table.push(vec![
                    Cell::from(k + 1),
                    Cell::from(z.re),
                    Cell::from(z.im),
                    Cell::from(r.map(|r| r.re)),
                    Cell::from(r.map(|r| r.im)),
                    Cell::from(w.re),
                    Cell::from(w.im),
                    Cell::from((z - w).norm()),
                ]);
            }
            notes.push(format!(
                "kappa {}  closed form max deviation {}  secular roots max deviation {}",
                a.kappa,
                sci(m.max_deviation),
                refined_dev.map(sci).unwrap_or_else(|| "n/a".into())
            ));
        }
        None => {
            for (k, w) in numeric.iter().enumerate() {
                let mut row = vec![Cell::from(k + 1)];
                row.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]);
                row.extend([Cell::from(w.re), Cell::from(w.im), Cell::Empty]);
                table.push(row);
            }
        }
    }
    let summary = json!({
        "command": "xx-compare",
        "params": params,
        "analytic": analytic,
        "refined": refined.as_deref().map(pairs),
        "numeric": pairs(numeric),
        "closed_form_max_deviation": closed_dev,
        "refined_max_deviation": refined_dev,
        "closed_form_refused": analytic.is_none(),
    });
    Ok(Report {
        title: header("xx-compare", &model),
        table,
        summary,
        notes,
    })
}

pub fn bench(common: &Common, tol: &Tolerances, sizes: &[usize], repeats: usize) -> Result<Report> {
    if sizes.is_empty() || sizes.contains(&0) {
        bail!("--sizes must list positive site counts");
    }
    let repeats = repeats.max(1);
    let mut table = Table::new(["L", "seconds", "ratio", "local_exponent"]);
    let mut seconds: Vec<f64> = Vec::with_capacity(sizes.len());
    for (i, &sites) in sizes.iter().enumerate() {
        let model = random_model(sites, common.seed.wrapping_add(sites as u64));
        let mut best = f64::INFINITY;
        for _ in 0..repeats {
            let start = Instant::now();
            solve(&model, tol)?;
            best = best.min(start.elapsed().as_secs_f64());
        }
        let (ratio, exponent) = if i > 0 {
            let r = best / seconds[i - 1];
            (
                Some(r),
                Some(r.ln() / (sites as f64 / sizes[i - 1] as f64).ln()),
            )
        } else {
            (None, None)
        };
        seconds.push(best);
        table.push(vec![
            Cell::from(sites),
            Cell::from(best),
            Cell::from(ratio),
            Cell::from(exponent),
        ]);
    }
    let fitted = fit_exponent(sizes, &seconds);
    let summary = json!({
        "command": "bench",
        "sizes": sizes,
        "seconds": seconds,
        "repeats": repeats,
        "fitted_exponent": fitted,
    });
    Ok(Report {
        title: "bench: full solve (rapidities + steady state), best of repeats".into(),
        table,
        summary,
        notes: vec![format!(
            "fitted exponent {}",
            fitted
                .map(|e| format!("{e:.2}"))
                .unwrap_or_else(|| "n/a".into())
        )],
    })
}

/// Least-squares slope of `ln t` against `ln L`.
fn fit_exponent(sizes: &[usize], seconds: &[f64]) -> Option<f64> {
    if sizes.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = sizes.iter().map(|&l| (l as f64).ln()).collect();
    let ys: Vec<f64> = seconds.iter().map(|t| t.max(1e-12).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
