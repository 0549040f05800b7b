//! `cascades report`: population-by-polarity cross-tabulation and per-group
//! summary statistics from a classified user table.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;

use cascades_core::io;
use cascades_core::partisan::{distribution_summaries, population_table, Grouping};

use crate::commands::{ensure_out_dir, report_skipped, require_input};
use crate::config::RunConfig;
use crate::manifest::Manifest;

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// users_classified.csv from a polarize run.
    #[arg(long)]
    pub users: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn run(args: &ReportArgs, config: &RunConfig) -> Result<()> {
    require_input(&args.users)?;
    ensure_out_dir(&args.out_dir)?;

    let (users, skipped) = io::read_users_classified::<f64>(&args.users)
        .with_context(|| format!("reading {}", args.users.display()))?;
    report_skipped(&args.users, &skipped, config.strict)?;
    if users.is_empty() {
        bail!("no users in {}", args.users.display());
    }

    let table = population_table(&users);
    io::write_population_table(&args.out_dir.join("population_table.csv"), &table)?;

    let mut stats = String::from("grouping,group,metric,count,mean,median\n");
    for (grouping, label) in [(Grouping::Population, "population"), (Grouping::Polarity, "polarity")]
    {
        for ((group, metric), table) in distribution_summaries(&users, grouping) {
            let mean = table.mean.map(|v| v.to_string()).unwrap_or_default();
            let median = table.median.map(|v| v.to_string()).unwrap_or_default();
            stats.push_str(&format!(
                "{label},{group},{metric},{},{mean},{median}\n",
                table.count
            ));
        }
    }
    io::write_text(&args.out_dir.join("group_stats.csv"), &stats)?;

    Manifest::new("report", config)
        .input("users", &args.users)
        .output("population_table.csv")
        .output("group_stats.csv")
        .write(&args.out_dir)?;

    let all = &table["all"];
    println!(
        "report: {} users ({} polarized: {} democrat, {} republican) -> {}",
        all.total,
        all.polarized,
        all.democrat,
        all.republican,
        args.out_dir.display()
    );
    Ok(())
}
