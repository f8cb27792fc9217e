use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quadlind::XxChainParams;

#[derive(Debug, Parser)]
#[command(
    name = "quadlind",
    version,
    about = "Rapidities, steady states and dynamics of quadratic fermionic Lindblad equations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON model file.
    #[arg(long, global = true, value_name = "PATH")]
    pub model: Option<PathBuf>,
    /// Boundary-driven XX chain: L,J,h_z,Gamma_1,Gamma_L,nbar_1,nbar_L[,hbar].
    #[arg(long, global = true, value_name = "PARAMS", value_parser = parse_xx)]
    pub xx: Option<XxChainParams>,
    /// Random model with this many sites (seeded by --seed).
    #[arg(long = "L", global = true, value_name = "SITES")]
    pub sites: Option<usize>,
    /// Output file; the JSON summary goes to stdout when absent.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Hermiticity and positivity tolerance used when validating the model.
    #[arg(long, global = true, value_name = "FLOAT")]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest L for which the superoperator oracle is built.
    #[arg(long = "lmax-oracle", global = true, default_value_t = quadlind::oracle::DEFAULT_MAX_SITES)]
    pub lmax_oracle: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Initial {
    /// All sites empty.
    Empty,
    /// All sites filled.
    Full,
    /// First half filled, second half empty.
    Domain,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rapidities of P and structural checks.
    Spectrum,
    /// Steady-state occupations, currents and two-point matrix.
    Steady,
    /// Evolve the correlation matrix from an initial state.
    Evolve {
        /// Final time; defaults to 10 / spectral gap.
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = 21)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Initial::Empty)]
        initial: Initial,
        /// Initial correlation matrix as a JSON matrix of [re, im] entries.
        #[arg(long, value_name = "PATH", conflicts_with = "initial")]
        c0: Option<PathBuf>,
    },
    /// Closed-form XX rapidities against the dense eigensolve.
    XxCompare,
    /// Cross-check every pipeline stage, against the oracle when L is small.
    Verify,
    /// Parameter sweep over one or two XX-chain axes.
    Sweep {
        /// `name=v1,v2,...` or `name=start:stop:count`; repeat for a second axis.
        #[arg(long = "axis", required = true, value_name = "SPEC")]
        axes: Vec<String>,
        /// Completed-row manifest (JSON lines); defaults to `<out>.rows.jsonl`.
        #[arg(long, value_name = "PATH")]
        manifest: Option<PathBuf>,
    },
    /// Time the full solve at several sizes.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "64,128,256,512")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
    },
}

pub fn parse_xx(s: &str) -> Result<XxChainParams, String> {
    let values: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if values.len() != 7 && values.len() != 8 {
        return Err(format!(
            "expected L,J,h_z,Gamma_1,Gamma_L,nbar_1,nbar_L[,hbar], got {} values",
            values.len()
        ));
    }
    let sites = values[0];
    if !(sites >= 1.0 && sites.fract() == 0.0) {
        return Err(format!("L must be a positive integer, got {sites}"));
    }
    let mut p = XxChainParams::new(sites as usize, values[1], values[2], values[3], values[4])
        .with_fillings(values[5], values[6]);
    if let Some(&hbar) = values.get(7) {
        p = p.with_hbar(hbar);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xx_flag() {
        let p = parse_xx("4,1,0,2,0.5,1,0").unwrap();
        assert_eq!(p.sites, 4);
        assert_eq!(p.gamma_l, 0.5);
        assert_eq!(p.nbar_1, 1.0);
        assert_eq!(p.hbar, 1.0);
        assert_eq!(parse_xx("4,1,0,2,0.5,1,0,2").unwrap().hbar, 2.0);
        assert!(parse_xx("4,1,0").is_err());
        assert!(parse_xx("2.5,1,0,2,0.5,1,0").is_err());
        assert!(parse_xx("4,x,0,2,0.5,1,0").is_err());
    }

    #[test]
    fn command_line_parses() {
        let cli = Cli::try_parse_from(["quadlind", "verify", "--L", "2", "--seed", "7"]).unwrap();
        assert!(matches!(cli.command, Command::Verify));
        assert_eq!(cli.common.sites, Some(2));
        assert_eq!(cli.common.seed, 7);
        let cli = Cli::try_parse_from([
            "quadlind",
            "sweep",
            "--xx",
            "4,1,0,2,0.5,1,0",
            "--axis",
            "Gamma_1=0.5,1,2",
        ])
        .unwrap();
        match cli.command {
            Command::Sweep { axes, .. } => assert_eq!(axes, vec!["Gamma_1=0.5,1,2"]),
            _ => panic!(),
        }
    }
}
