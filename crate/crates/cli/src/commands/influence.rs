//! `cascades influence`: per-event and per-user influence over a cascade
//! corpus.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;

use cascades_core::cascade::DecayConfig;
use cascades_core::influence::{build_report, pairwise_influence};
use cascades_core::io;

use crate::commands::{ensure_out_dir, report_skipped, require_input};
use crate::config::RunConfig;
use crate::manifest::Manifest;

/// Largest cascade the matrix dump is written for.
const MATRIX_DUMP_CAP: usize = 32;

#[derive(Debug, Args)]
pub struct InfluenceArgs {
    /// Cascade table (cascade_id,tweet_id,user_id,timestamp,followers).
    #[arg(long)]
    pub cascades: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Temporal decay rate override.
    #[arg(long)]
    pub r: Option<f64>,
    /// Follower smoothing override.
    #[arg(long)]
    pub smoothing: Option<f64>,
    /// Drop cascades with fewer events than this.
    #[arg(long)]
    pub min_size: Option<usize>,
    /// Also dump the pairwise influence matrix of every cascade with at most
    /// 32 events.
    #[arg(long)]
    pub dump_matrices: bool,
}

pub fn run(args: &InfluenceArgs, config: &mut RunConfig) -> Result<()> {
    if let Some(r) = args.r {
        config.r = r;
    }
    if let Some(smoothing) = args.smoothing {
        config.smoothing = smoothing;
    }
    if let Some(min_size) = args.min_size {
        config.min_size = min_size;
    }
    config.validate()?;

    require_input(&args.cascades)?;
    ensure_out_dir(&args.out_dir)?;

    let corpus = io::read_cascades::<f64>(&args.cascades)
        .with_context(|| format!("reading {}", args.cascades.display()))?;
    report_skipped(&args.cascades, &corpus.skipped, config.strict)?;

    let cascades: Vec<_> = corpus
        .cascades
        .into_iter()
        .filter(|c| c.len() >= config.min_size)
        .collect();
    if cascades.is_empty() {
        bail!(
            "empty corpus: no valid cascades of size >= {} in {}",
            config.min_size,
            args.cascades.display()
        );
    }

    let decay = DecayConfig::new(config.r, config.smoothing);
    let report = build_report(&cascades, &decay)?;

    io::write_user_influence(
        &args.out_dir.join("user_influence.csv"),
        &report.per_user,
        &report.percentile,
    )?;
    io::write_tweet_influence(
        &args.out_dir.join("tweet_influence.csv"),
        &cascades,
        &report.per_event,
    )?;

    if args.dump_matrices {
        let mut dumped = 0usize;
        for cascade in &cascades {
            if cascade.len() > MATRIX_DUMP_CAP {
                continue;
            }
            let matrix = pairwise_influence(cascade, &decay)?;
            io::write_matrix(
                &args.out_dir.join(format!("matrix_{}.csv", cascade.id())),
                &matrix,
            )?;
            dumped += 1;
        }
        eprintln!("dumped {dumped} influence matrices (n <= {MATRIX_DUMP_CAP})");
    }

    Manifest::new("influence", config)
        .input("cascades", &args.cascades)
        .output("user_influence.csv")
        .output("tweet_influence.csv")
        .write(&args.out_dir)?;

    println!(
        "influence: {} cascades, {} users -> {}",
        cascades.len(),
        report.per_user.len(),
        args.out_dir.display()
    );
    Ok(())
}
