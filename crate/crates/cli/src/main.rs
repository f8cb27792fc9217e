//! `quadlind` command-line front end.
//!
//! Exit status: 0 on success, 1 for invalid input, 2 for numerical failures
//! (including failed `verify` checks).

mod cli;
mod commands;
mod output;
mod source;
mod sweep;
mod verify;

use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use cli::{Cli, Command};
use output::emit;

/// Marks a run whose numerics completed but failed verification.
#[derive(Debug)]
struct ChecksFailed;

impl std::fmt::Display for ChecksFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "one or more verification checks failed")
    }
}

impl std::error::Error for ChecksFailed {}

fn run(cli: Cli) -> Result<()> {
    let common = &cli.common;
    let tol = source::tolerances(common)?;
    let report = match cli.command {
        Command::Spectrum => commands::spectrum(common, &tol)?,
        Command::Steady => commands::steady(common, &tol)?,
        Command::Evolve {
            t_max,
            steps,
            initial,
            c0,
        } => commands::evolve(common, &tol, t_max, steps, initial, c0.as_deref())?,
        Command::XxCompare => commands::xx_compare(common, &tol)?,
        Command::Verify => {
            let (report, passed) = verify::verify(common, &tol)?;
            emit(&report, common.out.as_deref(), common.format)?;
            return if passed {
                Ok(())
            } else {
                Err(ChecksFailed.into())
            };
        }
        Command::Sweep { axes, manifest } => {
            let base = source::load_chain(common, &tol)?;
            let axes = axes
                .iter()
                .map(|a| sweep::parse_axis(a))
                .collect::<Result<Vec<_>>>()?;
            if axes.len() > 2 {
                anyhow::bail!(
                    "at most two --axis options are supported, got {}",
                    axes.len()
                );
            }
            let points = sweep::grid(&base, &axes);
            let manifest = manifest.or_else(|| common.out.as_deref().map(sweep::default_manifest));
            let outcome = sweep::run_sweep(&points, manifest.as_deref(), &tol)?;
            sweep::report(&base, &axes, &outcome)
        }
        Command::Bench { sizes, repeats } => commands::bench(common, &tol, &sizes, repeats)?,
    };
    emit(&report, common.out.as_deref(), common.format)
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(e) = e.downcast_ref::<quadlind::Error>() {
        return e.exit_code() as u8;
    }
    if e.downcast_ref::<ChecksFailed>().is_some() {
        return 2;
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
