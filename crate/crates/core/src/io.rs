//! JSON model files.
//!
//! Two layouts are accepted. An explicit model lists the matrices, with each
//! complex entry written as `[re, im]` and matrices as row-major nested arrays:
//!
//! ```json
//! {"L": 1, "hbar": 1.0, "h": [[[0, 0]]],
//!  "lambda_plus": [[[0.75, 0]]], "lambda_minus": [[[0.25, 0]]]}
//! ```
//!
//! A chain model gives the physical parameters instead:
//!
//! ```json
//! {"xx_chain": {"L": 4, "J": 1, "h_z": 0, "Gamma_1": 2, "Gamma_L": 0.5,
//!               "nbar_1": 1, "nbar_L": 0}}
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::model::{validate_model, ModelSpec, Tolerances, ValidatedModel, XxChainParams};

/// A complex entry; bare numbers are read as real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Pair([f64; 2]),
    Real(f64),
}

impl From<Entry> for Complex64 {
    fn from(e: Entry) -> Self {
        match e {
            Entry::Pair([re, im]) => Complex64::new(re, im),
            Entry::Real(re) => Complex64::new(re, 0.0),
        }
    }
}

impl From<Complex64> for Entry {
    fn from(z: Complex64) -> Self {
        Entry::Pair([z.re, z.im])
    }
}

pub type MatrixJson = Vec<Vec<Entry>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitModel {
    #[serde(rename = "L")]
    pub sites: usize,
    #[serde(default = "one")]
    pub hbar: f64,
    pub h: MatrixJson,
    pub lambda_plus: MatrixJson,
    pub lambda_minus: MatrixJson,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainModel {
    pub xx_chain: XxChainParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
}

/// Contents of a model file.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelFile {
    Explicit(ExplicitModel),
    Chain(ChainModel),
}

pub fn matrix_to_json(a: &CMat) -> MatrixJson {
    linalg::to_rows(a)
        .into_iter()
        .map(|row| row.into_iter().map(Entry::from).collect())
        .collect()
}

pub fn matrix_from_json(name: &'static str, rows: &MatrixJson, sites: usize) -> Result<CMat> {
    if rows.len() != sites || rows.iter().any(|r| r.len() != sites) {
        let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
        return Err(Error::Dimension {
            name,
            rows: rows.len(),
            cols,
            expected: sites,
        });
    }
    Ok(CMat::from_fn(sites, sites, |i, j| rows[i][j].into()))
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if value.get("xx_chain").is_some() {
            serde_json::from_value(value)
                .map(ModelFile::Chain)
                .map_err(|e| Error::Format(format!("xx_chain: {e}")))
        } else {
            serde_json::from_value(value)
                .map(ModelFile::Explicit)
                .map_err(|e| Error::Format(e.to_string()))
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            ModelFile::Explicit(m) => serde_json::to_string_pretty(m),
            ModelFile::Chain(c) => serde_json::to_string_pretty(c),
        }
        .expect("model files always serialize")
    }

    pub fn from_model(model: &ValidatedModel) -> Self {
        match model.chain() {
            Some(chain) => ModelFile::Chain(ChainModel {
                xx_chain: *chain,
                hbar: None,
            }),
            None => ModelFile::Explicit(ExplicitModel {
                sites: model.sites(),
                hbar: model.hbar(),
                h: matrix_to_json(model.h()),
                lambda_plus: matrix_to_json(model.lambda_plus()),
                lambda_minus: matrix_to_json(model.lambda_minus()),
            }),
        }
    }

    pub fn into_model(self, tol: &Tolerances) -> Result<ValidatedModel> {
        match self {
            ModelFile::Chain(mut c) => {
                if let Some(hbar) = c.hbar {
                    c.xx_chain.hbar = hbar;
                }
                c.xx_chain.model()
            }
            ModelFile::Explicit(m) => {
                if m.sites == 0 {
                    return Err(Error::InvalidParameter {
                        name: "L",
                        value: 0.0,
                        reason: "at least one site is required",
                    });
                }
                let spec = ModelSpec {
                    h: matrix_from_json("h", &m.h, m.sites)?,
                    lambda_plus: matrix_from_json("lambda_plus", &m.lambda_plus, m.sites)?,
                    lambda_minus: matrix_from_json("lambda_minus", &m.lambda_minus, m.sites)?,
                    hbar: m.hbar,
                };
                validate_model(spec, tol)
            }
        }
    }
}

/// Parses and validates a model file.
pub fn parse_model(text: &str, tol: &Tolerances) -> Result<ValidatedModel> {
    ModelFile::parse(text)?.into_model(tol)
}
