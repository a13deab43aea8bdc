//! Command-line front end: reads a TOML run configuration, dispatches to the
//! analytic or simulation routines and writes CSV or JSON tables.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::Parser;

pub use commands::execute;
pub use config::{Command, Format, RunConfig, SimTarget};
pub use output::{Cell, Table};

/// Environment variable that overrides `sim.worker_hint`.
pub const WORKERS_ENV: &str = "SWITCHQ_WORKERS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Model(#[from] switchq::Error),
}

impl CliError {
    /// 2 for parameter regimes where the requested quantity does not exist,
    /// 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        use switchq::Error as E;
        match self {
            CliError::Model(E::NoSteadyState(_) | E::UnsupportedRegime(_) | E::UndefinedMean(_)) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "switchq", version, about = "M/M/1 queue in a two-state random environment")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides output.dir.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; overrides output.format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Simulation seed; overrides sim.seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Applies command-line and environment overrides to a loaded config.
pub fn apply_overrides(cfg: &mut RunConfig, args: &Args, workers: Option<&str>) -> Result<(), CliError> {
    if let Some(sim) = cfg.sim.as_mut() {
        if let Some(seed) = args.seed {
            sim.seed = seed;
        }
        if let Some(w) = workers {
            sim.worker_hint = w
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{WORKERS_ENV} must be a positive integer, got '{w}'")))?;
        }
    }
    if let Some(out) = &args.out {
        cfg.output.dir = Some(out.clone());
    }
    if let Some(f) = args.format {
        cfg.output.format = Some(f);
    }
    Ok(())
}

/// Runs one invocation and returns the files written.
pub fn run(args: &Args) -> Result<Vec<PathBuf>, CliError> {
    let mut cfg = RunConfig::load(&args.config)?;
    let workers = std::env::var(WORKERS_ENV).ok();
    apply_overrides(&mut cfg, args, workers.as_deref())?;
    let tables = execute(args.command, &cfg)?;
    let dir = cfg.output.dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let format = cfg.output.format.unwrap_or_default();
    tables.iter().map(|t| t.write(&dir, format)).collect()
}
