//! Benchmark harness for the `matfield` library.
//!
//! Five subcommands compare exact kriging with its sparse and low-rank
//! approximations on simulated Gaussian Matérn fields:
//!
//! * `cov-error` — standardized L² covariance error per method and range;
//! * `kriging-bench` — kriging error against the optimal predictor plus
//!   three-step timings, with a mean/std aggregate table;
//! * `taper-sweep` — taper accuracy/cost as a function of the taper range
//!   against a fixed Markov baseline;
//! * `demo-predict` — one data set predicted onto a grid by every method,
//!   as plain-text matrices for plotting;
//! * `selftest` — recomputes the frozen numeric constants.
//!
//! Every run is described by a strict TOML manifest ([`config::RunConfig`]);
//! given the same manifest and seed, output files are byte-identical except
//! for timing columns. Replicate simulation parallelizes across threads,
//! while every timed engine call runs on the main thread.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod methods;
pub mod runner;

use config::{CommandKind, RunConfig, Scale};
use error::{CliError, Result};

/// Command-line interface definition.
#[derive(Debug, Parser)]
#[command(
    name = "matfield-bench",
    version,
    about = "Accuracy-versus-cost benchmarks for Matérn field approximations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Run manifest (TOML). Defaults to the preset for the chosen scale.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Overrides the manifest seed.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    /// Worker threads for replicate simulation (0 = all cores).
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    pub threads: usize,

    /// Output directory (created if absent).
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,

    /// Use the laptop-sized preset (the default).
    #[arg(long, global = true, conflicts_with = "paper_scale")]
    pub desk: bool,

    /// Use the full study-sized preset (hours of compute).
    #[arg(long = "paper-scale", global = true)]
    pub paper_scale: bool,
}

/// The benchmark subcommands.
#[derive(Clone, Copy, Debug, Subcommand)]
pub enum Command {
    /// Covariance error per (method, nu, range).
    CovError,
    /// Kriging error and step timings per replicate, plus aggregates.
    KrigingBench,
    /// Taper accuracy and cost versus taper range.
    TaperSweep,
    /// Prediction fields for one simulated data set.
    DemoPredict,
    /// Recompute the frozen constants and a solver smoke check.
    Selftest,
}

impl Command {
    fn kind(self) -> Option<CommandKind> {
        match self {
            Command::CovError => Some(CommandKind::CovError),
            Command::KrigingBench => Some(CommandKind::KrigingBench),
            Command::TaperSweep => Some(CommandKind::TaperSweep),
            Command::DemoPredict => Some(CommandKind::DemoPredict),
            Command::Selftest => None,
        }
    }
}

/// Resolves the manifest for a command: explicit file, else the preset for
/// the selected scale, with the seed flag applied on top.
pub fn resolve_config(cli: &Cli) -> Result<Option<RunConfig>> {
    let Some(kind) = cli.command.kind() else {
        return Ok(None);
    };
    let mut config = match &cli.config {
        Some(path) => RunConfig::from_path(path)?,
        None => {
            let scale = if cli.paper_scale {
                Scale::Paper
            } else {
                Scale::Desk
            };
            RunConfig::preset(kind, scale)
        }
    };
    if let Some(seed) = cli.seed {
        config.experiment.seed = seed;
    }
    Ok(Some(config))
}

/// Runs one parsed invocation end to end.
pub fn run(cli: &Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| CliError::ConfigInvalid(format!("cannot build thread pool: {e}")))?;

    let config = resolve_config(cli)?;
    if let Some(config) = &config {
        std::fs::create_dir_all(&cli.out).map_err(|source| CliError::OutputWrite {
            path: cli.out.clone(),
            source,
        })?;
        pool.install(|| dispatch(cli.command, config, cli))
    } else {
        commands::selftest::run()
    }
}

fn dispatch(command: Command, config: &RunConfig, cli: &Cli) -> Result<()> {
    match command {
        Command::CovError => {
            let (path, ran, skipped) = commands::cov_error::run(config, &cli.out)?;
            println!(
                "cov-error: wrote {} ({} combinations, {} skipped)",
                path.display(),
                ran,
                skipped
            );
        }
        Command::KrigingBench => {
            let paths = commands::kriging_bench::run(config, &cli.out)?;
            println!(
                "kriging-bench: wrote {} and {}",
                paths.rows.display(),
                paths.aggregate.display()
            );
        }
        Command::TaperSweep => {
            let path = commands::taper_sweep::run(config, &cli.out)?;
            println!("taper-sweep: wrote {}", path.display());
        }
        Command::DemoPredict => {
            let path = commands::demo_predict::run(config, &cli.out)?;
            println!("demo-predict: wrote {}", path.display());
        }
        Command::Selftest => unreachable!("selftest handled before dispatch"),
    }
    Ok(())
}
