//! `qnet` — command-line front end for the decoherence-network simulator.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Ctx;
use qnet::QnetError;

/// Error carrying the process exit code: 1 validation, 2 runtime/numerical,
/// 3 size cap exceeded.
#[derive(Debug)]
pub struct CliError {
    pub msg: String,
    pub code: u8,
}

impl CliError {
    pub fn validation(msg: String) -> Self {
        CliError { msg, code: 1 }
    }

    pub fn runtime(msg: String) -> Self {
        CliError { msg, code: 2 }
    }
}

impl From<QnetError> for CliError {
    fn from(e: QnetError) -> Self {
        let code = match e {
            QnetError::SizeCap(_) => 3,
            QnetError::InvalidArgument(_) | QnetError::InvalidState(_) => 1,
            _ => 2,
        };
        CliError { msg: e.to_string(), code }
    }
}

#[derive(Parser)]
#[command(
    name = "qnet",
    version,
    about = "Simulate and analyze iterated controlled-unitary decoherence networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON configuration file (run config, network config, or sweep config).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path prefix; without it, results go to stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Override the number of recorded iteration steps.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Override the convergence tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Override the register-size cap for the superoperator oracle.
    #[arg(long = "oracle-cap", global = true)]
    oracle_cap: Option<usize>,
    /// Seed for the Monte-Carlo trajectory sampler.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Replace every environment Bloch angle θ by π−θ (the literal rather
    /// than the corrected benchmark state).
    #[arg(long = "delta-literal", global = true)]
    delta_literal: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check a network/run configuration and print the validation report.
    Validate,
    /// Iterate the channel and write the trajectory CSV plus a summary JSON.
    Simulate,
    /// Compute the asymptotic state along every applicable path.
    Asymptotic,
    /// Report the analytic attractor family and the oracle cross-check.
    Attractors,
    /// Classify the system state as fragile, robust, or separable.
    Classify,
    /// Run a family of configurations along one axis and write a long CSV.
    Sweep,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = cli
        .config
        .ok_or_else(|| CliError::validation("--config is required".into()))?;
    let ctx = Ctx {
        config,
        out: cli.out,
        steps: cli.steps,
        tol: cli.tol,
        oracle_cap: cli.oracle_cap,
        seed: cli.seed,
        delta_literal: cli.delta_literal,
    };
    match cli.command {
        Command::Validate => commands::cmd_validate(&ctx),
        Command::Simulate => commands::cmd_simulate(&ctx),
        Command::Asymptotic => commands::cmd_asymptotic(&ctx),
        Command::Attractors => commands::cmd_attractors(&ctx),
        Command::Classify => commands::cmd_classify(&ctx),
        Command::Sweep => commands::cmd_sweep(&ctx),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}
