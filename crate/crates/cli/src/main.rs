use std::path::PathBuf;
use std::process::ExitCode;

use bos_cli::commands::{self, Outcome, TableError};
use bos_cli::config::{CommonArgs, Defaults, RunConfig};
use bos_cli::output::emit;
use clap::{Parser, Subcommand};

const EXIT_VALIDATION: u8 = 1;
const EXIT_COMPUTATION: u8 = 2;

#[derive(Parser)]
#[command(name = "bos", version, about = "Eigenvalues of the BOS operator -(p u')' = mu w u on (0, 1)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues by shooting, finite differences or recurrence.
    Eigs {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Window eigenvalues for the stored tables.
    Table {
        #[command(flatten)]
        common: CommonArgs,
        /// Compare every cell with the golden value and gate on 2e-4.
        #[arg(long)]
        reproduce: bool,
        /// CSV of golden cells (epsilon,n,m,lambda) to use instead of the embedded tables.
        #[arg(long)]
        golden: Option<PathBuf>,
    },
    /// Identity, bound and convergence checks; exit 1 on a hard-gate failure.
    Validate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Samples of the Schrödinger potential V(s).
    Potential {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Forward and minimal solutions of the coefficient recurrence.
    RecurrenceDump {
        #[command(flatten)]
        common: CommonArgs,
        /// Spectral parameter; defaults to the first eigenvalue.
        #[arg(long)]
        lambda: Option<f64>,
    },
}

fn defaults(epsilon: &[f64], n_max: usize, tol: f64) -> Defaults {
    Defaults {
        epsilon: epsilon.to_vec(),
        n_max,
        ms: vec![7],
        tol,
    }
}

fn finish(result: Result<Outcome, String>, cfg: &RunConfig) -> ExitCode {
    match result {
        Ok(outcome) => {
            if let Err(e) = emit(&outcome.report, cfg) {
                eprintln!("error: cannot write report: {e}");
                return ExitCode::from(EXIT_COMPUTATION);
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VALIDATION)
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_COMPUTATION)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, defaults) = match &cli.command {
        Command::Eigs { common } => (common, defaults(&[1.0], 5, 1e-8)),
        Command::Table { common, .. } => (
            common,
            Defaults {
                ms: bos_core::golden::WINDOW_MS.to_vec(),
                ..defaults(&[1.0, 0.5, 0.1], 10, 1e-8)
            },
        ),
        Command::Validate { common } => (common, defaults(&[0.1, 0.5, 1.0], 20, 1e-8)),
        Command::Potential { common } => (common, defaults(&[1.0], 200, 1e-8)),
        Command::RecurrenceDump { common, .. } => (common, defaults(&[1.0], 40, 1e-8)),
    };
    let cfg = match RunConfig::resolve(common, &defaults) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_COMPUTATION);
        }
    };
    let result = match &cli.command {
        Command::Eigs { .. } => commands::eigs(&cfg).map_err(|e| e.to_string()),
        Command::Table { reproduce, golden, common } => {
            commands::table(&cfg, *reproduce, golden.as_deref(), common.epsilon.is_some()).map_err(|e| match e {
                TableError::Input(s) => s,
                TableError::Compute(e) => e.to_string(),
            })
        }
        Command::Validate { .. } => commands::validate(&cfg).map_err(|e| e.to_string()),
        Command::Potential { .. } => commands::potential(&cfg).map_err(|e| e.to_string()),
        Command::RecurrenceDump { lambda, .. } => commands::recurrence_dump(&cfg, *lambda).map_err(|e| e.to_string()),
    };
    finish(result, &cfg)
}
