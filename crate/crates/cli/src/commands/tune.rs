//! `cascades tune-decay`: linear search for the decay rate maximizing mean
//! follow-edge prediction AUC.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;

use cascades_core::calibrate::{log_grid, tune_decay};
use cascades_core::io;

use crate::commands::{ensure_out_dir, report_skipped, require_input};
use crate::config::RunConfig;
use crate::manifest::Manifest;

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[arg(long)]
    pub cascades: PathBuf,
    /// Follow table (follower_id,followee_id).
    #[arg(long)]
    pub follows: PathBuf,
    #[arg(long)]
    pub grid_lo: Option<f64>,
    #[arg(long)]
    pub grid_hi: Option<f64>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub smoothing: Option<f64>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn run(args: &TuneArgs, config: &mut RunConfig) -> Result<()> {
    if let Some(lo) = args.grid_lo {
        config.grid_lo = lo;
    }
    if let Some(hi) = args.grid_hi {
        config.grid_hi = hi;
    }
    if let Some(points) = args.grid_points {
        config.grid_points = points;
    }
    if let Some(smoothing) = args.smoothing {
        config.smoothing = smoothing;
    }
    config.validate()?;

    require_input(&args.cascades)?;
    require_input(&args.follows)?;
    ensure_out_dir(&args.out_dir)?;

    let corpus = io::read_cascades::<f64>(&args.cascades)
        .with_context(|| format!("reading {}", args.cascades.display()))?;
    report_skipped(&args.cascades, &corpus.skipped, config.strict)?;
    if corpus.cascades.is_empty() {
        bail!("empty corpus: no valid cascades in {}", args.cascades.display());
    }
    let (follows, skipped) = io::read_follow_graph(&args.follows)
        .with_context(|| format!("reading {}", args.follows.display()))?;
    report_skipped(&args.follows, &skipped, config.strict)?;

    let grid = log_grid::<f64>(config.grid_lo, config.grid_hi, config.grid_points);
    let result = tune_decay(&corpus.cascades, &follows, &grid, config.smoothing)?;

    io::write_calibration(&args.out_dir.join("calibration.csv"), &result)?;
    io::write_text(
        &args.out_dir.join("best.csv"),
        &format!("best_r,best_auc\n{},{}\n", result.best_r, result.best_auc),
    )?;

    Manifest::new("tune-decay", config)
        .input("cascades", &args.cascades)
        .input("follows", &args.follows)
        .output("calibration.csv")
        .output("best.csv")
        .write(&args.out_dir)?;

    println!(
        "tune-decay: best r = {:.6e} with mean AUC {:.4} over {} grid points -> {}",
        result.best_r,
        result.best_auc,
        result.grid.len(),
        args.out_dir.display()
    );
    Ok(())
}
