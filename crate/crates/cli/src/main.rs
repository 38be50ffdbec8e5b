//! Batch front-end: builds or ingests antennas and runs analyses, capacity
//! estimates, load optimizations and waveform simulations from a JSON config.

mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;
use output::OutputDir;

/// Error taxonomy mapped to exit codes: 1 config, 2 ingestion, 3 numerical
/// degeneracy, 4 internal.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Ingestion(String),
    Numerical(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Ingestion(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Ingestion(m) => write!(f, "ingestion error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<beamspace::Error> for CliError {
    fn from(e: beamspace::Error) -> Self {
        use beamspace::Error::*;
        match e {
            Touchstone { .. } | PatternFile { .. } | ImportInconsistent(_) | Io(_) => {
                CliError::Ingestion(e.to_string())
            }
            ResonantLoadDegeneracy { .. } | SingularMatrix(_) | NonPsdCorrelation(_)
            | DegenerateBasis => CliError::Numerical(e.to_string()),
            Json(_) => CliError::Internal(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "beamspace",
    version,
    about = "Single-RF-chain beam-space MIMO analysis and optimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed override; required here or in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores). Results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the antenna model and export Touchstone + pattern files.
    Model,
    /// Fixed-load analysis: reflection, imbalance, basis powers, pattern cuts.
    Analyze,
    /// Ergodic BPSK capacity versus frequency and SNR.
    Capacity,
    /// 2-D reactance sweep, optimal-load curves, contours, sub-band plans.
    Optimize,
    /// Switched-waveform PSDs and out-of-band power summary.
    Spectrum,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Model => "model",
            Command::Analyze => "analyze",
            Command::Capacity => "capacity",
            Command::Optimize => "optimize",
            Command::Spectrum => "spectrum",
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot configure {n} threads: {e}")))?;
    }
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let out_path = cli
        .out
        .as_ref()
        .ok_or_else(|| CliError::Config("--out <dir> is required".into()))?;
    let mut config = RunConfig::from_file(config_path)?;
    let seed = config.resolve_seed(cli.seed)?;
    let out = OutputDir::new(out_path, cli.command.name(), &config)?;
    match cli.command {
        Command::Model => commands::cmd_model(&config, &out),
        Command::Analyze => commands::cmd_analyze(&config, &out),
        Command::Capacity => commands::cmd_capacity(&config, &out, seed),
        Command::Optimize => commands::cmd_optimize(&config, &out, seed),
        Command::Spectrum => commands::cmd_spectrum(&config, &out, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
