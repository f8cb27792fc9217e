use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context, Result};
use quadlind::dynamics::spectral_gap;
use quadlind::linalg::match_multisets;
use quadlind::steady::steady_state;
use quadlind::xx::{analytic_rapidities, check_condition};
use quadlind::{Error, SpectralData, Tolerances, XxChainParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::output::{Cell, Report, Table};

pub const AXIS_NAMES: [&str; 8] = [
    "L", "J", "h_z", "Gamma_1", "Gamma_L", "nbar_1", "nbar_L", "hbar",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

/// `name=v1,v2,...` or `name=start:stop:count` (inclusive, evenly spaced).
pub fn parse_axis(spec: &str) -> Result<Axis> {
    let (name, values) = spec
        .split_once('=')
        .ok_or_else(|| anyhow!("axis {spec:?}: expected name=values"))?;
    let name = name.trim();
    if !AXIS_NAMES.contains(&name) {
        bail!("axis {spec:?}: unknown parameter {name:?}, expected one of {AXIS_NAMES:?}");
    }
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| anyhow!("axis {spec:?}: {s:?}: {e}"))
    };
    let values: Vec<f64> = if values.contains(':') {
        let parts: Vec<&str> = values.split(':').collect();
        if parts.len() != 3 {
            bail!("axis {spec:?}: range must be start:stop:count");
        }
        let (start, stop) = (parse(parts[0])?, parse(parts[1])?);
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|e| anyhow!("axis {spec:?}: count: {e}"))?;
        match count {
            0 => bail!("axis {spec:?}: count must be positive"),
            1 => vec![start],
            n => (0..n)
                .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    } else {
        values.split(',').map(parse).collect::<Result<_>>()?
    };
    if values.is_empty() {
        bail!("axis {spec:?}: no values");
    }
    if name == "L" && values.iter().any(|&v| !(v >= 1.0 && v.fract() == 0.0)) {
        bail!("axis {spec:?}: L values must be positive integers");
    }
    Ok(Axis {
        name: name.to_string(),
        values,
    })
}

fn set(p: &mut XxChainParams, name: &str, v: f64) {
    match name {
        "L" => p.sites = v as usize,
        "J" => p.j = v,
        "h_z" => p.h_z = v,
        "Gamma_1" => p.gamma_1 = v,
        "Gamma_L" => p.gamma_l = v,
        "nbar_1" => p.nbar_1 = v,
        "nbar_L" => p.nbar_l = v,
        "hbar" => p.hbar = v,
        _ => unreachable!("axis names are checked when parsed"),
    }
}

/// Grid points in row order: the first axis varies slowest.
pub fn grid(base: &XxChainParams, axes: &[Axis]) -> Vec<XxChainParams> {
    let mut points = vec![*base];
    for axis in axes {
        points = points
            .iter()
            .flat_map(|p| {
                axis.values.iter().map(move |&v| {
                    let mut q = *p;
                    set(&mut q, &axis.name, v);
                    q
                })
            })
            .collect();
    }
    points
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub params: XxChainParams,
    pub rapidity_min_re: Option<f64>,
    pub rapidity_max_re: Option<f64>,
    pub rapidity_max_abs_im: Option<f64>,
    pub gap: Option<f64>,
    pub occupations: Option<Vec<f64>>,
    /// Mean bond current.
    pub current: Option<f64>,
    pub current_spread: Option<f64>,
    pub closed_form_deviation: Option<f64>,
    pub flags: Vec<String>,
    pub error: Option<String>,
}

impl SweepRow {
    fn new(index: usize, params: XxChainParams) -> Self {
        SweepRow {
            index,
            params,
            rapidity_min_re: None,
            rapidity_max_re: None,
            rapidity_max_abs_im: None,
            gap: None,
            occupations: None,
            current: None,
            current_spread: None,
            closed_form_deviation: None,
            flags: Vec::new(),
            error: None,
        }
    }
}

/// One grid point; failures are recorded in the row rather than propagated.
pub fn compute_row(index: usize, params: XxChainParams, tol: &Tolerances) -> SweepRow {
    let mut row = SweepRow::new(index, params);
    if let Err(e) = fill_row(&mut row, tol) {
        row.flags.push(
            if e.is_validation() {
                "invalid"
            } else {
                "numerical"
            }
            .into(),
        );
        row.error = Some(e.to_string());
    }
    row
}

fn fill_row(row: &mut SweepRow, tol: &Tolerances) -> quadlind::Result<()> {
    let model = row.params.model()?;
    let spectral = SpectralData::from_model(&model, tol)?;
    let r = &spectral.rapidities;
    row.rapidity_min_re = r.iter().map(|z| z.re).reduce(f64::min);
    row.rapidity_max_re = r.iter().map(|z| z.re).reduce(f64::max);
    row.rapidity_max_abs_im = r.iter().map(|z| z.im.abs()).reduce(f64::max);
    row.gap = spectral_gap(&spectral).ok();
    if spectral.low_confidence {
        row.flags.push("low_confidence".into());
    }
    if check_condition(&row.params) {
        match analytic_rapidities(&row.params) {
            Ok(a) => {
                row.closed_form_deviation = Some(match_multisets(&a.lambdas, r)?.max_deviation)
            }
            Err(Error::DivergentBeta { .. }) => row.flags.push("divergent_beta".into()),
            Err(_) => row.flags.push("closed_form_inapplicable".into()),
        }
    }
    if spectral.is_marginal() {
        row.flags.push("marginal".into());
    }
    let ss = steady_state(&model, &spectral, tol)?;
    if let Some(c) = &ss.currents {
        if !c.is_empty() {
            row.current = Some(c.iter().sum::<f64>() / c.len() as f64);
        }
    }
    row.current_spread = ss.current_spread();
    row.occupations = Some(ss.occupations);
    Ok(())
}

/// `<out>.rows.jsonl` next to the output file.
pub fn default_manifest(out: &Path) -> PathBuf {
    out.with_extension("rows.jsonl")
}

/// Completed rows from an earlier run. A torn last line is dropped; rows that
/// do not belong to this grid make the manifest unusable.
pub fn read_manifest(path: &Path, points: &[XxChainParams]) -> Result<Vec<SweepRow>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e).with_context(|| format!("reading {}", path.display())),
    };
    let mut done: Vec<Option<SweepRow>> = vec![None; points.len()];
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let Ok(row) = serde_json::from_str::<SweepRow>(line) else {
            continue;
        };
        if points.get(row.index) != Some(&row.params) {
            bail!(
                "manifest {} holds row {} for a different sweep; remove it or pass another --manifest",
                path.display(),
                row.index
            );
        }
        let index = row.index;
        done[index] = Some(row);
    }
    Ok(done.into_iter().flatten().collect())
}

fn threads() -> Result<Option<usize>> {
    match std::env::var("QUADLIND_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| anyhow!("QUADLIND_THREADS must be a positive integer, got {v:?}"))?;
            if n == 0 {
                bail!("QUADLIND_THREADS must be a positive integer, got 0");
            }
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub resumed: usize,
}

pub fn run_sweep(
    points: &[XxChainParams],
    manifest: Option<&Path>,
    tol: &Tolerances,
) -> Result<SweepOutcome> {
    let mut rows = match manifest {
        Some(path) => read_manifest(path, points)?,
        None => Vec::new(),
    };
    let resumed = rows.len();
    let writer = match manifest {
        Some(path) => {
            // rewrite so a torn trailing line cannot corrupt the next append
            let mut f =
                File::create(path).with_context(|| format!("creating {}", path.display()))?;
            for row in &rows {
                writeln!(f, "{}", serde_json::to_string(row)?)?;
            }
            f.sync_data()?;
            drop(f);
            let f = OpenOptions::new().append(true).open(path)?;
            Some(Mutex::new(f))
        }
        None => None,
    };
    let mut have = vec![false; points.len()];
    for row in &rows {
        have[row.index] = true;
    }
    let todo: Vec<usize> = (0..points.len()).filter(|&i| !have[i]).collect();

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build()?;
    let fresh: Vec<SweepRow> = pool.install(|| {
        todo.par_iter()
            .map(|&i| {
                let row = compute_row(i, points[i], tol);
                if let Some(w) = &writer {
                    let line = serde_json::to_string(&row)?;
                    let mut f = w.lock().map_err(|_| anyhow!("manifest lock poisoned"))?;
                    writeln!(f, "{line}")?;
                    f.flush()?;
                }
                Ok(row)
            })
            .collect::<Result<_>>()
    })?;
    rows.extend(fresh);
    rows.sort_by_key(|r| r.index);
    Ok(SweepOutcome { rows, resumed })
}

pub fn report(base: &XxChainParams, axes: &[Axis], outcome: &SweepOutcome) -> Report {
    let mut table = Table::new([
        "index",
        "L",
        "J",
        "h_z",
        "Gamma_1",
        "Gamma_L",
        "nbar_1",
        "nbar_L",
        "hbar",
        "rapidity_min_re",
        "rapidity_max_re",
        "rapidity_max_abs_im",
        "gap",
        "n_first",
        "n_last",
        "current",
        "current_spread",
        "closed_form_deviation",
        "flags",
        "error",
    ]);
    for r in &outcome.rows {
        let p = &r.params;
        let occ = r.occupations.as_deref();
        table.push(vec![
            Cell::from(r.index),
            Cell::from(p.sites),
            Cell::from(p.j),
            Cell::from(p.h_z),
            Cell::from(p.gamma_1),
            Cell::from(p.gamma_l),
            Cell::from(p.nbar_1),
            Cell::from(p.nbar_l),
            Cell::from(p.hbar),
            Cell::from(r.rapidity_min_re),
            Cell::from(r.rapidity_max_re),
            Cell::from(r.rapidity_max_abs_im),
            Cell::from(r.gap),
            Cell::from(occ.and_then(|o| o.first().copied())),
            Cell::from(occ.and_then(|o| o.last().copied())),
            Cell::from(r.current),
            Cell::from(r.current_spread),
            Cell::from(r.closed_form_deviation),
            Cell::from(r.flags.join(";")),
            Cell::from(r.error.clone().unwrap_or_default()),
        ]);
    }
    let failed = outcome.rows.iter().filter(|r| r.error.is_some()).count();
    let flagged = outcome.rows.iter().filter(|r| !r.flags.is_empty()).count();
    let summary = json!({
        "command": "sweep",
        "base": base,
        "axes": axes,
        "rows": outcome.rows,
        "failed_rows": failed,
    });
    Report {
        title: format!(
            "sweep: {} points over {} axes",
            outcome.rows.len(),
            axes.len()
        ),
        table,
        summary,
        notes: vec![format!(
            "{} rows resumed from manifest, {flagged} flagged, {failed} failed",
            outcome.resumed
        )],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_forms() {
        let a = parse_axis("Gamma_1=0.5,1,2").unwrap();
        assert_eq!(a.values, vec![0.5, 1.0, 2.0]);
        let b = parse_axis("J=0:1:5").unwrap();
        assert_eq!(b.values, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_axis("h_z=3:9:1").unwrap().values, vec![3.0]);
        assert!(parse_axis("gamma=1").is_err());
        assert!(parse_axis("L=2.5").is_err());
        assert!(parse_axis("J=0:1").is_err());
        assert!(parse_axis("J").is_err());
    }

    #[test]
    fn grid_order_is_row_major() {
        let base = XxChainParams::new(4, 1.0, 0.0, 2.0, 0.5);
        let axes = [parse_axis("L=2,3").unwrap(), parse_axis("J=1,2,3").unwrap()];
        let g = grid(&base, &axes);
        let got: Vec<(usize, f64)> = g.iter().map(|p| (p.sites, p.j)).collect();
        assert_eq!(
            got,
            vec![(2, 1.0), (2, 2.0), (2, 3.0), (3, 1.0), (3, 2.0), (3, 3.0)]
        );
    }

    #[test]
    fn failing_point_is_isolated() {
        let good = XxChainParams::new(4, 1.0, 0.0, 2.0, 0.5);
        let bad = XxChainParams::new(4, 1.0, 0.0, -2.0, 0.5);
        let row = compute_row(0, bad, &Tolerances::default());
        assert!(row.error.is_some());
        assert_eq!(row.flags, vec!["invalid"]);
        let row = compute_row(1, good, &Tolerances::default());
        assert!(row.error.is_none(), "{:?}", row.error);
        assert!(row.closed_form_deviation.unwrap() < 1.0);
    }

    #[test]
    fn divergent_point_is_flagged() {
        // kappa = 1 and even L
        let p = XxChainParams::new(4, 1.0, 0.0, 1.0, 1.0);
        let row = compute_row(0, p, &Tolerances::default());
        assert!(row.flags.contains(&"divergent_beta".to_string()), "{row:?}");
    }
}
