//! `warpineq`: flows, inequality verifiers, eigenvalue bounds and corpus
//! sweeps from the command line.
//!
//! Exit status: 0 pass, 1 inequality violated or monotonicity failed,
//! 2 usage or configuration error, 3 numerical failure.

mod commands;
mod config;
mod output;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Outcome;
use crate::config::{CommonArgs, RunConfig};
use crate::output::Sink;

/// Environment variable holding the worker count for sweeps.
pub const WORKERS_ENV: &str = "WARPINEQ_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "warpineq", version, about = "Weighted curvature inequalities in space forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a curvature flow and check its monotone quantities
    Flow(CommonArgs),
    /// Evaluate an inequality (or a suite) on one shape
    Verify(CommonArgs),
    /// Low eigenvalues of -Δ f = λ H_k f and the upper bound for λ₁
    Eigen(CommonArgs),
    /// Run a verifier or a flow over a random convex corpus
    Sweep(CommonArgs),
}

/// A usage or configuration error (exit status 2).
#[derive(Debug)]
pub struct Usage(String);

impl Usage {
    pub fn new(msg: impl Into<String>) -> anyhow::Error {
        anyhow::Error::new(Usage(msg.into()))
    }
}

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    match e.downcast_ref::<warpineq::Error>() {
        Some(err) if err.is_numerical() || matches!(err, warpineq::Error::NotMonotone(_)) => 3,
        _ => 2,
    }
}

fn configure_workers() -> anyhow::Result<()> {
    let Ok(text) = std::env::var(WORKERS_ENV) else { return Ok(()) };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Usage::new(format!("{WORKERS_ENV} must be a positive integer, got `{text}`")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn execute(cli: Cli) -> anyhow::Result<Outcome> {
    configure_workers()?;
    let (name, args) = match &cli.command {
        Command::Flow(a) => ("flow", a),
        Command::Verify(a) => ("verify", a),
        Command::Eigen(a) => ("eigen", a),
        Command::Sweep(a) => ("sweep", a),
    };
    let mut cfg = RunConfig::load(name, args)?;
    cfg.resolve_defaults()?;
    let sink = Sink::new(args.out.as_deref())?;
    match cli.command {
        Command::Flow(_) => commands::cmd_flow(&cfg, &sink),
        Command::Verify(_) => commands::cmd_verify(&cfg, &sink),
        Command::Eigen(_) => commands::cmd_eigen(&cfg, &sink),
        Command::Sweep(_) => commands::cmd_sweep(&cfg, &sink),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(outcome) => ExitCode::from(outcome.code() as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
