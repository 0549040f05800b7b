//! `cascades map`: the 2D polarization map over influence percentile and
//! rescaled botness.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;

use cascades_core::io;
use cascades_core::partisan::{PolarityClass, Polarity};
use cascades_core::polmap::{build_polarization_grid, Bandwidth, MapPoint};

use crate::commands::{ensure_out_dir, report_skipped, require_input};
use crate::config::RunConfig;
use crate::manifest::Manifest;

#[derive(Debug, Args)]
pub struct MapArgs {
    /// users_classified.csv from a polarize run.
    #[arg(long)]
    pub users: PathBuf,
    /// user_influence.csv from an influence run.
    #[arg(long)]
    pub influence: PathBuf,
    /// Grid cells per axis.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Kernel bandwidth: `auto` for Scott's rule or a fixed number.
    #[arg(long)]
    pub bandwidth: Option<String>,
    /// Density floor keeping the log-ratio finite in empty regions.
    #[arg(long)]
    pub floor: Option<f64>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn run(args: &MapArgs, config: &mut RunConfig) -> Result<()> {
    if let Some(resolution) = args.resolution {
        config.resolution = resolution;
    }
    if let Some(bandwidth) = &args.bandwidth {
        config.bandwidth = if bandwidth.eq_ignore_ascii_case("auto") {
            None
        } else {
            Some(bandwidth.parse::<f64>().context("--bandwidth must be `auto` or a number")?)
        };
    }
    if let Some(floor) = args.floor {
        config.density_floor = floor;
    }
    config.validate()?;

    require_input(&args.users)?;
    require_input(&args.influence)?;
    ensure_out_dir(&args.out_dir)?;

    let (users, skipped) = io::read_users_classified::<f64>(&args.users)
        .with_context(|| format!("reading {}", args.users.display()))?;
    report_skipped(&args.users, &skipped, config.strict)?;
    let (_, percentile) = io::read_user_influence::<f64>(&args.influence)
        .with_context(|| format!("reading {}", args.influence.display()))?;

    let mut missing_influence = 0usize;
    let mut missing_botness = 0usize;
    let mut points: Vec<MapPoint<f64>> = Vec::new();
    for user in &users {
        let polarity = match user.polarity {
            PolarityClass::Democrat => Polarity::Democrat,
            PolarityClass::Republican => Polarity::Republican,
            _ => continue,
        };
        let Some(botness) = user.record.botness else {
            missing_botness += 1;
            continue;
        };
        // the influence file wins over any percentile embedded in the users
        // table, so the map always reflects the named influence run
        let x = match percentile
            .get(&user.record.user_id)
            .copied()
            .or(user.influence_percentile)
        {
            Some(x) => x,
            None => {
                missing_influence += 1;
                continue;
            }
        };
        points.push(MapPoint {
            x,
            y_raw: botness,
            polarity,
        });
    }
    if missing_influence + missing_botness > 0 {
        eprintln!(
            "warning: dropped {missing_influence} polarized user(s) without influence and {missing_botness} without botness"
        );
    }
    if points.is_empty() {
        bail!(
            "no polarized users with both botness and influence in {}",
            args.users.display()
        );
    }

    let bandwidth = match config.bandwidth {
        None => Bandwidth::Scott,
        Some(h) => Bandwidth::Fixed { x: h, y: h },
    };
    let grid = build_polarization_grid(
        &points,
        config.resolution,
        config.resolution,
        bandwidth,
        config.density_floor,
    )?;
    io::write_polarization_map(&args.out_dir.join("polarization_map.csv"), &grid)?;

    Manifest::new("map", config)
        .input("users", &args.users)
        .input("influence", &args.influence)
        .output("polarization_map.csv")
        .write(&args.out_dir)?;

    println!(
        "map: {} points on a {}x{} grid -> {}",
        points.len(),
        config.resolution,
        config.resolution,
        args.out_dir.display()
    );
    Ok(())
}
