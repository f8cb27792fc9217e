use std::fs;

use anyhow::{bail, Context, Result};
use quadlind::io::parse_model;
use quadlind::random::random_model;
use quadlind::{Tolerances, ValidatedModel, XxChainParams};

use crate::cli::Common;

pub fn tolerances(common: &Common) -> Result<Tolerances> {
    let mut tol = Tolerances::default();
    if let Some(t) = common.tol {
        if !(t.is_finite() && t > 0.0) {
            bail!("--tol must be a positive number, got {t}");
        }
        tol.hermitian = t;
        tol.psd = t;
    }
    Ok(tol)
}

/// Model from exactly one of `--model`, `--xx` or `--L`.
pub fn load_model(common: &Common, tol: &Tolerances) -> Result<ValidatedModel> {
    let given = [
        common.model.is_some(),
        common.xx.is_some(),
        common.sites.is_some(),
    ];
    match given.iter().filter(|&&g| g).count() {
        0 => bail!("no model given: pass --model PATH, --xx PARAMS or --L SITES"),
        1 => {}
        _ => bail!("--model, --xx and --L are mutually exclusive"),
    }
    if let Some(path) = &common.model {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(parse_model(&text, tol)?);
    }
    if let Some(p) = &common.xx {
        return Ok(p.model()?);
    }
    let sites = common.sites.unwrap_or_default();
    if sites == 0 {
        bail!("--L must be at least 1");
    }
    Ok(random_model(sites, common.seed))
}

/// Chain parameters from `--xx` or a chain model file.
pub fn load_chain(common: &Common, tol: &Tolerances) -> Result<XxChainParams> {
    if let Some(p) = common.xx {
        return Ok(p);
    }
    if common.model.is_some() {
        if let Some(p) = load_model(common, tol)?.chain() {
            return Ok(*p);
        }
        bail!("model file does not describe an XX chain");
    }
    bail!("an XX chain is required: pass --xx L,J,h_z,Gamma_1,Gamma_L,nbar_1,nbar_L");
}
