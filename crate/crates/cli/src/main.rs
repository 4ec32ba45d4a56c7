//! `couette-lab`: run damping, toy-model, weight, lemma and simulation experiments and
//! write plot-ready CSV/JSON with a hashed manifest.

mod config;
mod verbs;

use clap::{Parser, Subcommand};
use config::ConfigError;
use std::path::PathBuf;
use std::process::ExitCode;
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "couette-lab", version, about)]
struct Cli {
    /// TOML configuration file; every key has a default.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(
        long,
        short,
        global = true,
        env = "COUETTE_LAB_OUT",
        default_value = "couette-lab-out"
    )]
    out: PathBuf,
    /// Dotted-key override applied after the file, e.g. `sim.dt=0.01`; repeatable.
    #[arg(long = "set", short = 's', global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Linear damping table and log-log slopes of the velocity norms.
    Linear,
    /// Toy-model trajectory and fitted growth envelope.
    Toy,
    /// Weight and multiplier profile for the modes in `[weight_profile]`.
    Weight,
    /// Sampled lemma and inequality sweeps, one JSON report each.
    Verify {
        /// Lemma id, e.g. TRICHOTOMY; repeatable.
        #[arg(long)]
        lemma: Vec<String>,
        /// Inequality tool id, e.g. TRIANGLE_S; repeatable.
        #[arg(long)]
        tool: Vec<String>,
    },
    /// Nonlinear run: energy series, snapshots and the echo report when configured.
    Simulate,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("output: {0}")]
    Output(#[from] couette_lab::report::ReportError),
    #[error("numerical abort: {0}")]
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Output(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = config::read_table(cli.config.as_deref())
        .map_err(CliError::from)
        .and_then(|table| verbs::dispatch(&cli.verb, table, &cli.overrides, &cli.out));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
