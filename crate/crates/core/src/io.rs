//! CSV readers and writers for every file format the pipeline speaks.
//!
//! All files are UTF-8 with LF line endings and a header row. Readers collect
//! malformed rows as diagnostics instead of failing, so callers decide
//! whether to warn or abort.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::calibrate::{CalibrationResult, FollowGraph};
use crate::cascade::{Cascade, CascadeEvent};
use crate::influence::{CascadePhi, PairwiseInfluenceMatrix};
use crate::partisan::{ClassifiedUser, PartisanLexicon, Polarity, UserRecord};
use crate::polmap::PolarizationGrid;
use crate::scalar::{from_f64, Real};
use crate::synth::GroundTruth;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{path}: missing column {column}")]
    MissingColumn { path: String, column: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

/// A skipped input row and the reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowIssue {
    pub line: u64,
    pub message: String,
}

impl std::fmt::Display for RowIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {} (row skipped)", self.line, self.message)
    }
}

fn column_index(
    headers: &csv::StringRecord,
    name: &str,
    path: &str,
) -> Result<usize, IoError> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| IoError::MissingColumn {
            path: path.to_string(),
            column: name.to_string(),
        })
}

fn open_reader(path: &Path) -> Result<csv::Reader<BufReader<File>>, IoError> {
    let file = File::open(path).map_err(IoError::from)?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(BufReader::new(file)))
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

/// A parsed cascade corpus: cascades sorted by id, plus skipped-row
/// diagnostics.
#[derive(Debug, Clone)]
pub struct CascadeCorpus<T> {
    pub cascades: Vec<Cascade<T>>,
    pub skipped: Vec<RowIssue>,
}

/// Reads the cascade table `cascade_id,tweet_id,user_id,timestamp,followers`.
///
/// Rows of one cascade need not be contiguous; rows are grouped by
/// `cascade_id` and each group is validated into a canonical [`Cascade`].
/// Rows with unparsable fields, non-finite timestamps or negative follower
/// counts are skipped with a diagnostic.
pub fn read_cascades<T: Real>(path: &Path) -> Result<CascadeCorpus<T>, IoError> {
    let mut reader = open_reader(path)?;
    let path_str = display(path);
    let headers = reader.headers()?.clone();
    let col_cascade = column_index(&headers, "cascade_id", &path_str)?;
    let col_tweet = column_index(&headers, "tweet_id", &path_str)?;
    let col_user = column_index(&headers, "user_id", &path_str)?;
    let col_time = column_index(&headers, "timestamp", &path_str)?;
    let col_followers = column_index(&headers, "followers", &path_str)?;

    let mut groups: BTreeMap<String, Vec<CascadeEvent<T>>> = BTreeMap::new();
    let mut skipped = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let mut issue = |message: String| skipped.push(RowIssue { line, message });

        let fields = (
            record.get(col_cascade),
            record.get(col_tweet),
            record.get(col_user),
            record.get(col_time),
            record.get(col_followers),
        );
        let (Some(cascade_id), Some(tweet_id), Some(user_id), Some(ts), Some(followers)) = fields
        else {
            issue("row has too few fields".to_string());
            continue;
        };
        let Ok(timestamp) = ts.trim().parse::<f64>() else {
            issue(format!("unparsable timestamp {ts:?}"));
            continue;
        };
        if !timestamp.is_finite() {
            issue(format!("timestamp {ts:?} is not finite"));
            continue;
        }
        let Ok(followers) = followers.trim().parse::<i64>() else {
            issue(format!("unparsable followers count {followers:?}"));
            continue;
        };
        if followers < 0 {
            issue(format!("negative followers count {followers}"));
            continue;
        }
        groups.entry(cascade_id.to_string()).or_default().push(CascadeEvent::new(
            tweet_id,
            user_id,
            from_f64::<T>(timestamp),
            followers as u64,
        ));
    }

    let cascades = groups
        .into_iter()
        .map(|(id, events)| Cascade::new(id, events).expect("rows pre-validated"))
        .collect();
    Ok(CascadeCorpus { cascades, skipped })
}

/// Writes a cascade corpus in the cascade table format.
pub fn write_cascades<T: Real>(path: &Path, cascades: &[Cascade<T>]) -> Result<(), IoError> {
    let mut writer = csv_writer(path)?;
    writer.write_record(["cascade_id", "tweet_id", "user_id", "timestamp", "followers"])?;
    for cascade in cascades {
        for event in cascade.events() {
            writer.write_record([
                cascade.id(),
                &event.tweet_id,
                &event.user_id,
                &event.timestamp.to_string(),
                &event.followers.to_string(),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// Reads the follow table `follower_id,followee_id`; self-loops and short
/// rows are skipped with diagnostics.
pub fn read_follow_graph(path: &Path) -> Result<(FollowGraph, Vec<RowIssue>), IoError> {
    let mut reader = open_reader(path)?;
    let path_str = display(path);
    let headers = reader.headers()?.clone();
    let col_follower = column_index(&headers, "follower_id", &path_str)?;
    let col_followee = column_index(&headers, "followee_id", &path_str)?;

    let mut edges = Vec::new();
    let mut skipped = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let (Some(follower), Some(followee)) =
            (record.get(col_follower), record.get(col_followee))
        else {
            skipped.push(RowIssue {
                line,
                message: "row has too few fields".to_string(),
            });
            continue;
        };
        if follower == followee {
            skipped.push(RowIssue {
                line,
                message: format!("self-loop on user {follower}"),
            });
            continue;
        }
        edges.push((follower.to_string(), followee.to_string()));
    }
    let graph = FollowGraph::from_edges(edges).expect("self-loops filtered");
    Ok((graph, skipped))
}

/// Reads the partisan lexicon `hashtag,polarity` with polarity `dem` or
/// `rep`. A hashtag listed with both polarities is an error.
pub fn read_lexicon(path: &Path) -> Result<(PartisanLexicon, Vec<RowIssue>), IoError> {
    let mut reader = open_reader(path)?;
    let path_str = display(path);
    let headers = reader.headers()?.clone();
    let col_tag = column_index(&headers, "hashtag", &path_str)?;
    let col_polarity = column_index(&headers, "polarity", &path_str)?;

    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let (Some(tag), Some(polarity)) = (record.get(col_tag), record.get(col_polarity)) else {
            skipped.push(RowIssue {
                line,
                message: "row has too few fields".to_string(),
            });
            continue;
        };
        let polarity = match polarity.trim().to_lowercase().as_str() {
            "dem" => Polarity::Democrat,
            "rep" => Polarity::Republican,
            other => {
                skipped.push(RowIssue {
                    line,
                    message: format!("unknown polarity {other:?} (expected dem or rep)"),
                });
                continue;
            }
        };
        entries.push((tag.to_string(), polarity));
    }
    let lexicon = PartisanLexicon::from_entries(entries).map_err(|e| IoError::Invalid {
        path: path_str,
        message: e.to_string(),
    })?;
    Ok((lexicon, skipped))
}

/// One tweet row of the hashtag table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TweetRecord {
    pub tweet_id: String,
    pub user_id: String,
    pub cascade_id: String,
    pub hashtags: Vec<String>,
}

/// Reads the tweet table `tweet_id,user_id,cascade_id,hashtags`, hashtags
/// being a `|`-separated list, possibly empty.
pub fn read_tweets(path: &Path) -> Result<(Vec<TweetRecord>, Vec<RowIssue>), IoError> {
    let mut reader = open_reader(path)?;
    let path_str = display(path);
    let headers = reader.headers()?.clone();
    let col_tweet = column_index(&headers, "tweet_id", &path_str)?;
    let col_user = column_index(&headers, "user_id", &path_str)?;
    let col_cascade = column_index(&headers, "cascade_id", &path_str)?;
    let col_tags = column_index(&headers, "hashtags", &path_str)?;

    let mut tweets = Vec::new();
    let mut skipped = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let (Some(tweet_id), Some(user_id), Some(cascade_id)) = (
            record.get(col_tweet),
            record.get(col_user),
            record.get(col_cascade),
        ) else {
            skipped.push(RowIssue {
                line,
                message: "row has too few fields".to_string(),
            });
            continue;
        };
        let hashtags: Vec<String> = record
            .get(col_tags)
            .unwrap_or("")
            .split('|')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.to_string())
            .collect();
        tweets.push(TweetRecord {
            tweet_id: tweet_id.to_string(),
            user_id: user_id.to_string(),
            cascade_id: cascade_id.to_string(),
            hashtags,
        });
    }
    Ok((tweets, skipped))
}

fn parse_flag(field: &str) -> Option<bool> {
    match field.trim().to_lowercase().as_str() {
        "1" | "true" | "yes" => Some(true),
        "" | "0" | "false" | "no" => Some(false),
        _ => None,
    }
}

/// Reads the user table
/// `user_id,botness,protected,suspended,followers,statuses,retweets,favorites`.
/// Botness may be empty only for protected or suspended users; a protected
/// user with a botness score violates the record invariants and is skipped.
pub fn read_user_records<T: Real>(
    path: &Path,
) -> Result<(Vec<UserRecord<T>>, Vec<RowIssue>), IoError> {
    let mut reader = open_reader(path)?;
    let path_str = display(path);
    let headers = reader.headers()?.clone();
    let col_user = column_index(&headers, "user_id", &path_str)?;
    let col_botness = column_index(&headers, "botness", &path_str)?;
    let col_protected = column_index(&headers, "protected", &path_str)?;
    let col_suspended = column_index(&headers, "suspended", &path_str)?;
    let col_followers = column_index(&headers, "followers", &path_str)?;
    let col_statuses = column_index(&headers, "statuses", &path_str)?;
    let col_retweets = column_index(&headers, "retweets", &path_str)?;
    let col_favorites = column_index(&headers, "favorites", &path_str)?;

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    'rows: for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let issue = |message: String| RowIssue { line, message };

        let Some(user_id) = record.get(col_user).filter(|u| !u.is_empty()) else {
            skipped.push(issue("missing user_id".to_string()));
            continue;
        };
        let mut user = UserRecord::<T>::new(user_id);

        let botness_field = record.get(col_botness).unwrap_or("").trim();
        if !botness_field.is_empty() {
            let Ok(score) = botness_field.parse::<f64>() else {
                skipped.push(issue(format!("unparsable botness {botness_field:?}")));
                continue;
            };
            if !(0.0..=1.0).contains(&score) {
                skipped.push(issue(format!("botness {score} outside [0, 1]")));
                continue;
            }
            user.botness = Some(from_f64(score));
        }
        match parse_flag(record.get(col_protected).unwrap_or("")) {
            Some(flag) => user.protected = flag,
            None => {
                skipped.push(issue("unparsable protected flag".to_string()));
                continue;
            }
        }
        match parse_flag(record.get(col_suspended).unwrap_or("")) {
            Some(flag) => user.suspended = flag,
            None => {
                skipped.push(issue("unparsable suspended flag".to_string()));
                continue;
            }
        }
        if user.protected && user.botness.is_some() {
            skipped.push(issue(
                "protected user cannot carry a botness score".to_string(),
            ));
            continue;
        }
        for (column, target) in [
            (col_followers, &mut user.followers),
            (col_statuses, &mut user.statuses_total),
            (col_retweets, &mut user.retweets_authored),
            (col_favorites, &mut user.favorites_total),
        ] {
            let field = record.get(column).unwrap_or("0").trim();
            let field = if field.is_empty() { "0" } else { field };
            match field.parse::<u64>() {
                Ok(value) => *target = value,
                Err(_) => {
                    skipped.push(issue(format!("unparsable count {field:?}")));
                    continue 'rows;
                }
            }
        }
        records.push(user);
    }
    Ok((records, skipped))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>, IoError> {
    let file = File::create(path)?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

/// Writes `user_id,influence,influence_percentile`, sorted by user id.
pub fn write_user_influence<T: Real>(
    path: &Path,
    influence: &BTreeMap<String, T>,
    percentile: &BTreeMap<String, T>,
) -> Result<(), IoError> {
    let mut writer = csv_writer(path)?;
    writer.write_record(["user_id", "influence", "influence_percentile"])?;
    for (user, score) in influence {
        let pct = percentile.get(user).copied().unwrap_or_else(T::zero);
        writer.write_record([user.as_str(), &score.to_string(), &pct.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}

/// Per-user score maps: `(influence, percentile)` keyed by user id.
pub type UserScoreMaps<T> = (BTreeMap<String, T>, BTreeMap<String, T>);

/// Reads `user_id,influence,influence_percentile` back into maps.
pub fn read_user_influence<T: Real>(path: &Path) -> Result<UserScoreMaps<T>, IoError> {
    let mut reader = open_reader(path)?;
    let path_str = display(path);
    let headers = reader.headers()?.clone();
    let col_user = column_index(&headers, "user_id", &path_str)?;
    let col_influence = column_index(&headers, "influence", &path_str)?;
    let col_percentile = column_index(&headers, "influence_percentile", &path_str)?;
    let mut influence = BTreeMap::new();
    let mut percentile = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let (Some(user), Some(score), Some(pct)) = (
            record.get(col_user),
            record.get(col_influence),
            record.get(col_percentile),
        ) else {
            continue;
        };
        let (Ok(score), Ok(pct)) = (score.parse::<f64>(), pct.parse::<f64>()) else {
            continue;
        };
        influence.insert(user.to_string(), from_f64::<T>(score));
        percentile.insert(user.to_string(), from_f64::<T>(pct));
    }
    Ok((influence, percentile))
}

/// Writes per-event influence `cascade_id,event_index,tweet_id,phi`, cascades
/// sorted by id.
pub fn write_tweet_influence<T: Real>(
    path: &Path,
    cascades: &[Cascade<T>],
    scores: &[CascadePhi<T>],
) -> Result<(), IoError> {
    let mut writer = csv_writer(path)?;
    writer.write_record(["cascade_id", "event_index", "tweet_id", "phi"])?;
    let mut order: Vec<usize> = (0..cascades.len()).collect();
    order.sort_by(|&a, &b| cascades[a].id().cmp(cascades[b].id()));
    for index in order {
        let cascade = &cascades[index];
        let phi = &scores[index];
        debug_assert_eq!(cascade.id(), phi.cascade_id);
        for (event, &score) in cascade.events().iter().zip(&phi.phi) {
            writer.write_record([
                cascade.id(),
                &event.event_index.to_string(),
                &event.tweet_id,
                &score.to_string(),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// Writes side-by-side oracle and recursive influence
/// `cascade_id,event_index,tweet_id,phi_oracle,phi_recursive`.
pub fn write_oracle_influence<T: Real>(
    path: &Path,
    rows: &[(Cascade<T>, Vec<T>, Vec<T>)],
) -> Result<(), IoError> {
    let mut writer = csv_writer(path)?;
    writer.write_record([
        "cascade_id",
        "event_index",
        "tweet_id",
        "phi_oracle",
        "phi_recursive",
    ])?;
    for (cascade, oracle, recursive) in rows {
        for (event, (a, b)) in cascade.events().iter().zip(oracle.iter().zip(recursive)) {
            writer.write_record([
                cascade.id(),
                &event.event_index.to_string(),
                &event.tweet_id,
                &a.to_string(),
                &b.to_string(),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// Debug dump of a pairwise influence matrix as a dense CSV block.
pub fn write_matrix<T: Real>(path: &Path, matrix: &PairwiseInfluenceMatrix<T>) -> Result<(), IoError> {
    let mut writer = csv_writer(path)?;
    for i in 0..matrix.n() {
        let row: Vec<String> = matrix.row(i).iter().map(|v| v.to_string()).collect();
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes ground truth `node,mean_reach`.
pub fn write_ground_truth<T: Real>(path: &Path, truth: &GroundTruth<T>) -> Result<(), IoError> {
    let mut writer = csv_writer(path)?;
    writer.write_record(["node", "mean_reach"])?;
    for (node, reach) in truth.iter() {
        writer.write_record([node.to_string(), reach.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes the estimator evaluation `spearman` one-liner.
pub fn write_eval<T: Real>(path: &Path, spearman: T) -> Result<(), IoError> {
    let mut writer = csv_writer(path)?;
    writer.write_record(["spearman"])?;
    writer.write_record([spearman.to_string()])?;
    writer.flush()?;
    Ok(())
}

/// Writes the calibration grid `r,mean_auc`.
pub fn write_calibration<T: Real>(
    path: &Path,
    result: &CalibrationResult<T>,
) -> Result<(), IoError> {
    let mut writer = csv_writer(path)?;
    writer.write_record(["r", "mean_auc"])?;
    for (r, auc) in &result.grid {
        writer.write_record([r.to_string(), auc.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}

fn optional<T: Real>(value: Option<T>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes the classified user table, sorted by user id.
pub fn write_users_classified<T: Real>(
    path: &Path,
    users: &[ClassifiedUser<T>],
) -> Result<(), IoError> {
    let mut writer = csv_writer(path)?;
    writer.write_record([
        "user_id",
        "dem_count",
        "rep_count",
        "engagement",
        "polarization",
        "polarity",
        "population",
        "botness",
        "followers",
        "statuses",
        "retweets",
        "favorites",
        "cascades_started",
        "mean_initiated_cascade_size",
        "influence",
        "influence_percentile",
    ])?;
    let mut order: Vec<usize> = (0..users.len()).collect();
    order.sort_by(|&a, &b| users[a].record.user_id.cmp(&users[b].record.user_id));
    for index in order {
        let user = &users[index];
        let record = &user.record;
        writer.write_record([
            record.user_id.as_str(),
            &record.dem_count.to_string(),
            &record.rep_count.to_string(),
            &record.engagement().to_string(),
            &optional(user.polarization),
            &user.polarity.to_string(),
            &user
                .population
                .map(|p| p.to_string())
                .unwrap_or_else(|| "unscored".to_string()),
            &optional(record.botness),
            &record.followers.to_string(),
            &record.statuses_total.to_string(),
            &record.retweets_authored.to_string(),
            &record.favorites_total.to_string(),
            &record.cascades_started.to_string(),
            &optional(record.mean_initiated_cascade_size),
            &optional(user.influence),
            &optional(user.influence_percentile),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads the classified user table back (for `map` and `report`).
pub fn read_users_classified<T: Real>(
    path: &Path,
) -> Result<(Vec<ClassifiedUser<T>>, Vec<RowIssue>), IoError> {
    use crate::partisan::{PolarityClass, PopulationClass};
    let mut reader = open_reader(path)?;
    let path_str = display(path);
    let headers = reader.headers()?.clone();
    let column = |name: &str| column_index(&headers, name, &path_str);
    let col_user = column("user_id")?;
    let col_dem = column("dem_count")?;
    let col_rep = column("rep_count")?;
    let col_polarization = column("polarization")?;
    let col_polarity = column("polarity")?;
    let col_population = column("population")?;
    let col_botness = column("botness")?;
    let col_followers = column("followers")?;
    let col_statuses = column("statuses")?;
    let col_retweets = column("retweets")?;
    let col_favorites = column("favorites")?;
    let col_started = column("cascades_started")?;
    let col_mean_size = column("mean_initiated_cascade_size")?;
    let col_influence = column("influence")?;
    let col_percentile = column("influence_percentile")?;

    let parse_optional = |field: Option<&str>| -> Option<T> {
        field
            .map(str::trim)
            .filter(|f| !f.is_empty())
            .and_then(|f| f.parse::<f64>().ok())
            .map(from_f64)
    };
    let parse_count = |field: Option<&str>| -> u64 {
        field
            .map(str::trim)
            .and_then(|f| f.parse::<u64>().ok())
            .unwrap_or(0)
    };

    let mut users = Vec::new();
    let mut skipped = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let Some(user_id) = record.get(col_user).filter(|u| !u.is_empty()) else {
            skipped.push(RowIssue {
                line,
                message: "missing user_id".to_string(),
            });
            continue;
        };
        let polarity = match record.get(col_polarity).map(str::trim) {
            Some("democrat") => PolarityClass::Democrat,
            Some("republican") => PolarityClass::Republican,
            Some("unpolarized") => PolarityClass::Unpolarized,
            Some("unengaged") => PolarityClass::Unengaged,
            other => {
                skipped.push(RowIssue {
                    line,
                    message: format!("unknown polarity class {other:?}"),
                });
                continue;
            }
        };
        let population = match record.get(col_population).map(str::trim) {
            Some("human") => Some(PopulationClass::Human),
            Some("bot") => Some(PopulationClass::Bot),
            Some("protected") => Some(PopulationClass::Protected),
            Some("suspended") => Some(PopulationClass::Suspended),
            Some("other") => Some(PopulationClass::Other),
            Some("unscored") => None,
            other => {
                skipped.push(RowIssue {
                    line,
                    message: format!("unknown population class {other:?}"),
                });
                continue;
            }
        };
        let mut record_out = UserRecord::<T>::new(user_id);
        record_out.dem_count = parse_count(record.get(col_dem));
        record_out.rep_count = parse_count(record.get(col_rep));
        record_out.botness = parse_optional(record.get(col_botness));
        record_out.protected = population == Some(PopulationClass::Protected);
        record_out.suspended = population == Some(PopulationClass::Suspended);
        record_out.followers = parse_count(record.get(col_followers));
        record_out.statuses_total = parse_count(record.get(col_statuses));
        record_out.retweets_authored = parse_count(record.get(col_retweets));
        record_out.favorites_total = parse_count(record.get(col_favorites));
        record_out.cascades_started = parse_count(record.get(col_started));
        record_out.mean_initiated_cascade_size = parse_optional(record.get(col_mean_size));
        users.push(ClassifiedUser {
            polarization: parse_optional(record.get(col_polarization)),
            influence: parse_optional(record.get(col_influence)),
            influence_percentile: parse_optional(record.get(col_percentile)),
            record: record_out,
            polarity,
            population,
        });
    }
    Ok((users, skipped))
}

/// Writes one CCDF table `value,fraction_ge`.
pub fn write_ccdf<T: Real>(path: &Path, table: &crate::partisan::CcdfTable<T>) -> Result<(), IoError> {
    let mut writer = csv_writer(path)?;
    writer.write_record(["value", "fraction_ge"])?;
    for (value, fraction) in &table.points {
        writer.write_record([value.to_string(), fraction.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes the population-by-polarity cross-tabulation.
pub fn write_population_table(
    path: &Path,
    table: &BTreeMap<String, crate::partisan::PolarityBreakdown>,
) -> Result<(), IoError> {
    let mut writer = csv_writer(path)?;
    writer.write_record(["population", "total", "polarized", "democrat", "republican"])?;
    for (column, cell) in table {
        writer.write_record([
            column.as_str(),
            &cell.total.to_string(),
            &cell.polarized.to_string(),
            &cell.democrat.to_string(),
            &cell.republican.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes the polarization map
/// `x_lo,x_hi,y_lo,y_hi,dem_density,rep_density,score`, row-major over x then
/// y.
pub fn write_polarization_map<T: Real>(
    path: &Path,
    grid: &PolarizationGrid<T>,
) -> Result<(), IoError> {
    let mut writer = csv_writer(path)?;
    writer.write_record([
        "x_lo",
        "x_hi",
        "y_lo",
        "y_hi",
        "dem_density",
        "rep_density",
        "score",
    ])?;
    for ix in 0..grid.gx {
        for iy in 0..grid.gy {
            let cell = grid.cell(ix, iy);
            writer.write_record([
                grid.x_edges[ix].to_string(),
                grid.x_edges[ix + 1].to_string(),
                grid.y_edges[iy].to_string(),
                grid.y_edges[iy + 1].to_string(),
                grid.dem_density[cell].to_string(),
                grid.rep_density[cell].to_string(),
                grid.score[cell].to_string(),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// Reads arbitrary bytes; used by determinism checks.
pub fn read_bytes(path: &Path) -> Result<Vec<u8>, IoError> {
    let mut buffer = Vec::new();
    File::open(path)?.read_to_end(&mut buffer)?;
    Ok(buffer)
}

/// Writes a string with LF endings as-is.
pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    let mut file = BufWriter::new(File::create(path)?);
    file.write_all(text.as_bytes())?;
    file.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn temp_file(name: &str, contents: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("cascades-core-io-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(format!("{}-{name}", std::process::id()));
        let mut file = File::create(&path).unwrap();
        file.write_all(contents.as_bytes()).unwrap();
        path
    }

    #[test]
    fn cascades_group_and_sort() {
        let path = temp_file(
            "cascades.csv",
            "cascade_id,tweet_id,user_id,timestamp,followers\n\
             c2,t3,u3,5,7\n\
             c1,t1,u1,100,3\n\
             c2,t4,u4,1,0\n\
             c1,t2,u2,90.5,2\n",
        );
        let corpus = read_cascades::<f64>(&path).unwrap();
        assert!(corpus.skipped.is_empty());
        assert_eq!(corpus.cascades.len(), 2);
        assert_eq!(corpus.cascades[0].id(), "c1");
        // out-of-order rows are sorted by timestamp within the cascade
        assert_eq!(corpus.cascades[0].events()[0].user_id, "u2");
        assert_eq!(corpus.cascades[1].events()[0].user_id, "u4");
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn malformed_rows_are_skipped_with_diagnostics() {
        let path = temp_file(
            "bad.csv",
            "cascade_id,tweet_id,user_id,timestamp,followers\n\
             c1,t1,u1,abc,3\n\
             c1,t2,u2,10,-4\n\
             c1,t3,u3,nan,1\n\
             c1,t4,u4,11,2\n",
        );
        let corpus = read_cascades::<f64>(&path).unwrap();
        assert_eq!(corpus.skipped.len(), 3);
        assert!(corpus.skipped[0].message.contains("timestamp"));
        assert!(corpus.skipped[1].message.contains("negative followers"));
        assert!(corpus.skipped[2].message.contains("not finite"));
        assert_eq!(corpus.cascades.len(), 1);
        assert_eq!(corpus.cascades[0].len(), 1);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn missing_header_is_an_error() {
        let path = temp_file("noheader.csv", "a,b,c\n1,2,3\n");
        let err = read_cascades::<f64>(&path).unwrap_err();
        assert!(matches!(err, IoError::MissingColumn { .. }));
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn cascade_round_trip() {
        let path = temp_file(
            "round.csv",
            "cascade_id,tweet_id,user_id,timestamp,followers\n\
             c1,t1,u1,0,3\n\
             c1,t2,u2,10.25,0\n",
        );
        let corpus = read_cascades::<f64>(&path).unwrap();
        let out = temp_file("round-out.csv", "");
        write_cascades(&out, &corpus.cascades).unwrap();
        let again = read_cascades::<f64>(&out).unwrap();
        assert_eq!(corpus.cascades, again.cascades);
        std::fs::remove_file(path).ok();
        std::fs::remove_file(out).ok();
    }

    #[test]
    fn follow_graph_reader_skips_self_loops() {
        let path = temp_file(
            "follows.csv",
            "follower_id,followee_id\nu1,u2\nu3,u3\nu2,u1\n",
        );
        let (graph, skipped) = read_follow_graph(&path).unwrap();
        assert_eq!(graph.edge_count(), 2);
        assert_eq!(skipped.len(), 1);
        assert!(graph.follows("u1", "u2"));
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn lexicon_and_tweets() {
        let lex_path = temp_file("lexicon.csv", "hashtag,polarity\nimwithher,dem\nMAGA,rep\n");
        let (lexicon, skipped) = read_lexicon(&lex_path).unwrap();
        assert!(skipped.is_empty());
        assert_eq!(lexicon.len(), 2);
        assert_eq!(
            lexicon.polarity_of("#ImWithHer"),
            Some(Polarity::Democrat)
        );

        let tweets_path = temp_file(
            "tweets.csv",
            "tweet_id,user_id,cascade_id,hashtags\nt1,u1,c1,imwithher|maga\nt2,u2,c1,\n",
        );
        let (tweets, skipped) = read_tweets(&tweets_path).unwrap();
        assert!(skipped.is_empty());
        assert_eq!(tweets[0].hashtags, vec!["imwithher", "maga"]);
        assert!(tweets[1].hashtags.is_empty());
        std::fs::remove_file(lex_path).ok();
        std::fs::remove_file(tweets_path).ok();
    }

    #[test]
    fn user_records_parse_and_validate() {
        let path = temp_file(
            "users.csv",
            "user_id,botness,protected,suspended,followers,statuses,retweets,favorites\n\
             u1,0.7,0,0,10,100,5,2\n\
             u2,,1,0,3,50,1,0\n\
             u3,0.4,1,0,1,1,1,1\n\
             u4,1.5,0,0,1,1,1,1\n",
        );
        let (records, skipped) = read_user_records::<f64>(&path).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].botness, Some(0.7));
        assert!(records[1].protected && records[1].botness.is_none());
        // protected-with-botness and out-of-range botness are both invalid
        assert_eq!(skipped.len(), 2);
        std::fs::remove_file(path).ok();
    }
}
