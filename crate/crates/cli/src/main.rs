//! `spinboson`: sweeps, crossing sequences, concurrence profiles and the
//! reference tables of the detuned spin-boson model.
//!
//! Energies are in units of the spin level spacing ω₀; couplings and
//! detunings are dimensionless.

mod commands;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use spinboson::Execution;

use crate::commands::{Grid, ModelArgs, TableChoice};
use crate::output::Format;

#[derive(Parser, Debug)]
#[command(name = "spinboson", version, about = "Exact ground states of the detuned spin-boson model")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,

    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Evaluate grids on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lowest energy of every block λ <= --lambda-max along a coupling grid.
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        /// Coupling grid lo:hi:steps (defaults to --kappa alone, else 0:3:61).
        #[arg(long, allow_hyphen_values = true)]
        kappa_range: Option<Grid>,
        #[arg(long, default_value = "4", allow_hyphen_values = true)]
        lambda_max: spinboson::Excitation,
    },
    /// Critical couplings of the ground-state crossings up to --lambda-max.
    Gsi {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "4", allow_hyphen_values = true)]
        lambda_max: spinboson::Excitation,
    },
    /// Ground-state pairwise concurrence along a coupling grid.
    Concurrence {
        #[command(flatten)]
        model: ModelArgs,
        /// Coupling grid lo:hi:steps (defaults to --kappa alone, else 0:4:401).
        #[arg(long, allow_hyphen_values = true)]
        kappa_range: Option<Grid>,
    },
    /// Crossing couplings of the one-mode model against detuning.
    PhaseDiagram {
        #[arg(long, default_value_t = 2)]
        n_spins: u32,
        /// Detuning grid lo:hi:steps.
        #[arg(long, default_value = "-0.99:2:60", allow_hyphen_values = true)]
        r_range: Grid,
        #[arg(long, default_value = "4", allow_hyphen_values = true)]
        lambda_max: spinboson::Excitation,
    },
    /// Recompute a reference table (1-5, or all) against the stored values.
    Table {
        #[arg(long, default_value = "all")]
        table: TableChoice,
    },
    /// Check the sequential-crossing conditions for two spins and one mode.
    Certify {
        /// Single detuning.
        #[arg(long, allow_negative_numbers = true, conflicts_with = "r_range")]
        r: Option<f64>,
        /// Detuning grid lo:hi:steps.
        #[arg(long, allow_hyphen_values = true)]
        r_range: Option<Grid>,
        #[arg(long, default_value_t = 8, allow_negative_numbers = true)]
        lambda_max: i32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let exec = if cli.output.sequential { Execution::Sequential } else { Execution::default() };
    let outcome = match &cli.command {
        Command::Spectrum { model, kappa_range, lambda_max } => {
            commands::spectrum(exec, model, kappa_range.as_ref(), *lambda_max)?
        }
        Command::Gsi { model, lambda_max } => commands::gsi(model, *lambda_max)?,
        Command::Concurrence { model, kappa_range } => commands::concurrence(exec, model, kappa_range.as_ref())?,
        Command::PhaseDiagram { n_spins, r_range, lambda_max } => {
            commands::phase_diagram(exec, *n_spins, r_range, *lambda_max)?
        }
        Command::Table { table } => commands::table(exec, table)?,
        Command::Certify { r, r_range, lambda_max } => commands::certify(exec, *r, r_range.as_ref(), *lambda_max)?,
    };

    match &cli.output.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            outcome.sheet.write(cli.output.format, &mut w)?;
            w.flush().with_context(|| format!("writing {}", path.display()))?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            outcome.sheet.write(cli.output.format, &mut w)?;
        }
    }

    if let Some(msg) = outcome.failure {
        eprintln!("{msg}");
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}
