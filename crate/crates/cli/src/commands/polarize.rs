//! `cascades polarize`: partisan hashtag counting, polarity and population
//! classification, and per-group distribution summaries.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;

use cascades_core::io;
use cascades_core::partisan::{
    cascades_started, classify_polarity, classify_population, count_partisan_hashtags,
    distribution_summaries, mean_initiated_cascade_size, ClassifiedUser, Grouping, UserRecord,
};

use crate::commands::{ensure_out_dir, report_skipped, require_input};
use crate::config::RunConfig;
use crate::manifest::Manifest;

#[derive(Debug, Args)]
pub struct PolarizeArgs {
    /// Tweet table (tweet_id,user_id,cascade_id,hashtags).
    #[arg(long)]
    pub tweets: PathBuf,
    /// Partisan lexicon (hashtag,polarity).
    #[arg(long)]
    pub lexicon: PathBuf,
    /// User table (user_id,botness,protected,suspended,followers,statuses,retweets,favorites).
    #[arg(long)]
    pub users: PathBuf,
    /// Cascade table, for initiated-cascade statistics.
    #[arg(long)]
    pub cascades: Option<PathBuf>,
    /// user_influence.csv from a prior influence run.
    #[arg(long)]
    pub influence: Option<PathBuf>,
    #[arg(long)]
    pub polarity_threshold: Option<f64>,
    #[arg(long)]
    pub human_threshold: Option<f64>,
    #[arg(long)]
    pub bot_threshold: Option<f64>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn run(args: &PolarizeArgs, config: &mut RunConfig) -> Result<()> {
    if let Some(threshold) = args.polarity_threshold {
        config.polarity_threshold = threshold;
    }
    if let Some(threshold) = args.human_threshold {
        config.human_threshold = threshold;
    }
    if let Some(threshold) = args.bot_threshold {
        config.bot_threshold = threshold;
    }
    config.validate()?;

    require_input(&args.tweets)?;
    require_input(&args.lexicon)?;
    require_input(&args.users)?;
    ensure_out_dir(&args.out_dir)?;

    let (lexicon, skipped) = io::read_lexicon(&args.lexicon)
        .with_context(|| format!("reading {}", args.lexicon.display()))?;
    report_skipped(&args.lexicon, &skipped, config.strict)?;
    if lexicon.is_empty() {
        bail!("lexicon {} contains no hashtags", args.lexicon.display());
    }
    let (tweets, skipped) = io::read_tweets(&args.tweets)
        .with_context(|| format!("reading {}", args.tweets.display()))?;
    report_skipped(&args.tweets, &skipped, config.strict)?;
    let (roster, skipped) = io::read_user_records::<f64>(&args.users)
        .with_context(|| format!("reading {}", args.users.display()))?;
    report_skipped(&args.users, &skipped, config.strict)?;

    let counts = count_partisan_hashtags(
        tweets
            .iter()
            .map(|t| (t.user_id.as_str(), t.hashtags.as_slice())),
        &lexicon,
    );

    let mut records: BTreeMap<String, UserRecord<f64>> = roster
        .into_iter()
        .map(|record| (record.user_id.clone(), record))
        .collect();
    for (user, tally) in &counts {
        let record = records
            .entry(user.clone())
            .or_insert_with(|| UserRecord::new(user.clone()));
        record.dem_count = tally.dem;
        record.rep_count = tally.rep;
    }

    if let Some(cascades_path) = &args.cascades {
        require_input(cascades_path)?;
        let corpus = io::read_cascades::<f64>(cascades_path)
            .with_context(|| format!("reading {}", cascades_path.display()))?;
        report_skipped(cascades_path, &corpus.skipped, config.strict)?;
        let started = cascades_started(&corpus.cascades);
        let mean_sizes = mean_initiated_cascade_size(&corpus.cascades);
        for (user, count) in started {
            if let Some(record) = records.get_mut(&user) {
                record.cascades_started = count;
            }
        }
        for (user, mean) in mean_sizes {
            if let Some(record) = records.get_mut(&user) {
                record.mean_initiated_cascade_size = Some(mean);
            }
        }
    }

    let (influence, percentile) = match &args.influence {
        Some(path) => {
            require_input(path)?;
            io::read_user_influence::<f64>(path)
                .with_context(|| format!("reading {}", path.display()))?
        }
        None => (BTreeMap::new(), BTreeMap::new()),
    };

    let mut unscored = 0usize;
    let users: Vec<ClassifiedUser<f64>> = records
        .into_values()
        .map(|record| {
            let polarity =
                classify_polarity(record.dem_count, record.rep_count, config.polarity_threshold);
            let population =
                match classify_population(&record, config.human_threshold, config.bot_threshold) {
                    Ok(class) => Some(class),
                    Err(_) => {
                        unscored += 1;
                        None
                    }
                };
            let polarization = record.polarization().ok();
            ClassifiedUser {
                polarization,
                influence: influence.get(&record.user_id).copied(),
                influence_percentile: percentile.get(&record.user_id).copied(),
                polarity,
                population,
                record,
            }
        })
        .collect();
    if unscored > 0 {
        eprintln!("warning: {unscored} user(s) have no botness score and no account flags");
    }

    io::write_users_classified(&args.out_dir.join("users_classified.csv"), &users)?;

    let mut manifest = Manifest::new("polarize", config)
        .input("tweets", &args.tweets)
        .input("lexicon", &args.lexicon)
        .input("users", &args.users)
        .output("users_classified.csv");
    if let Some(path) = &args.cascades {
        manifest = manifest.input("cascades", path);
    }
    if let Some(path) = &args.influence {
        manifest = manifest.input("influence", path);
    }

    for grouping in [Grouping::Population, Grouping::Polarity] {
        for ((group, metric), table) in distribution_summaries(&users, grouping) {
            let name = format!("ccdf_{metric}_{group}.csv");
            io::write_ccdf(&args.out_dir.join(&name), &table)?;
            manifest = manifest.output(&name);
        }
    }
    manifest.write(&args.out_dir)?;

    println!(
        "polarize: {} users classified ({} politically engaged) -> {}",
        users.len(),
        counts.len(),
        args.out_dir.display()
    );
    Ok(())
}
