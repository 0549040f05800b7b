//! Batch CLI over the cascade analytics library: influence estimation,
//! scenario-oracle verification, synthetic benchmarking, decay calibration,
//! partisan classification and the polarization map.
//!
//! Every command is deterministic given its inputs, configuration and seed,
//! and writes a `manifest.json` run record next to its outputs.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use crate::config::RunConfig;

#[derive(Debug, Parser)]
#[command(
    name = "cascades",
    version,
    about = "Influence and polarization analytics over retweet cascades"
)]
struct Cli {
    /// Flat key = value configuration file applied before command flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (0 = machine default).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Random seed for generative commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Abort on the first malformed input row instead of skipping it.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute per-event and per-user influence over a cascade corpus.
    Influence(commands::influence::InfluenceArgs),
    /// Cross-check small cascades against the exhaustive scenario oracle.
    Oracle(commands::oracle::OracleArgs),
    /// Generate synthetic graphs and cascades with known ground truth.
    Synth(commands::synth::SynthArgs),
    /// Search the decay rate maximizing follow-edge prediction AUC.
    TuneDecay(commands::tune::TuneArgs),
    /// Classify users by partisan hashtags, botness and account state.
    Polarize(commands::polarize::PolarizeArgs),
    /// Build the 2D polarization map from classified users and influence.
    Map(commands::map::MapArgs),
    /// Tabulate populations against polarity with summary statistics.
    Report(commands::report::ReportArgs),
}

fn run(cli: Cli) -> Result<()> {
    let mut config = RunConfig::default();
    if let Some(path) = &cli.config {
        config.apply_file(path)?;
    }
    if let Some(threads) = cli.threads {
        config.threads = threads;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if cli.strict {
        config.strict = true;
    }
    if config.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build_global()
            .context("configuring the worker pool")?;
    }

    match &cli.command {
        Command::Influence(args) => commands::influence::run(args, &mut config),
        Command::Oracle(args) => commands::oracle::run(args, &mut config),
        Command::Synth(args) => commands::synth::run(args, &mut config),
        Command::TuneDecay(args) => commands::tune::run(args, &mut config),
        Command::Polarize(args) => commands::polarize::run(args, &mut config),
        Command::Map(args) => commands::map::run(args, &mut config),
        Command::Report(args) => commands::report::run(args, &config),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(error) = run(cli) {
        eprintln!("error: {error:#}");
        std::process::exit(1);
    }
}
