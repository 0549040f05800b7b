//! Partisan hashtag counting, polarization/engagement scores, population
//! classification by botness, and distribution summaries.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::cascade::Cascade;
use crate::scalar::{from_count, from_u64, Real};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartisanError {
    #[error("hashtag {0} is listed with both polarities")]
    ConflictingHashtag(String),
    #[error("user {0} has no partisan hashtags; polarization is undefined")]
    Unengaged(String),
    #[error("user {0} is neither protected nor suspended but has no botness score")]
    MissingBotness(String),
}

/// Political side of a partisan hashtag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Democrat,
    Republican,
}

/// Polarity classification of a user from their polarization score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PolarityClass {
    Democrat,
    Republican,
    Unpolarized,
    Unengaged,
}

impl fmt::Display for PolarityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self {
            PolarityClass::Democrat => "democrat",
            PolarityClass::Republican => "republican",
            PolarityClass::Unpolarized => "unpolarized",
            PolarityClass::Unengaged => "unengaged",
        };
        f.write_str(label)
    }
}

/// Population classification of a user from account state and botness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PopulationClass {
    Human,
    Bot,
    Protected,
    Suspended,
    Other,
}

impl fmt::Display for PopulationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self {
            PopulationClass::Human => "human",
            PopulationClass::Bot => "bot",
            PopulationClass::Protected => "protected",
            PopulationClass::Suspended => "suspended",
            PopulationClass::Other => "other",
        };
        f.write_str(label)
    }
}

/// Hashtag -> polarity lookup. Tags are stored lowercased without the
/// leading `#`; lookups normalize the same way, so matching is
/// case-insensitive exact.
#[derive(Debug, Clone, Default)]
pub struct PartisanLexicon {
    tags: HashMap<String, Polarity>,
}

fn normalize_tag(tag: &str) -> String {
    tag.trim().trim_start_matches('#').to_lowercase()
}

impl PartisanLexicon {
    /// Builds from `(hashtag, polarity)` pairs; a tag listed with both
    /// polarities is an error, duplicates of one polarity collapse.
    pub fn from_entries<I, S>(entries: I) -> Result<Self, PartisanError>
    where
        I: IntoIterator<Item = (S, Polarity)>,
        S: AsRef<str>,
    {
        let mut tags = HashMap::new();
        for (tag, polarity) in entries {
            let normalized = normalize_tag(tag.as_ref());
            if normalized.is_empty() {
                continue;
            }
            match tags.insert(normalized.clone(), polarity) {
                Some(previous) if previous != polarity => {
                    return Err(PartisanError::ConflictingHashtag(normalized));
                }
                _ => {}
            }
        }
        Ok(Self { tags })
    }

    pub fn polarity_of(&self, tag: &str) -> Option<Polarity> {
        self.tags.get(&normalize_tag(tag)).copied()
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }
}

/// Partisan hashtag counts of one user.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PartisanCounts {
    pub dem: u64,
    pub rep: u64,
}

/// Counts every partisan hashtag occurrence per user. A tweet with two
/// Republican hashtags adds two; a tweet carrying both polarities adds to
/// both tallies.
pub fn count_partisan_hashtags<'a, I, S>(
    tweets: I,
    lexicon: &PartisanLexicon,
) -> BTreeMap<String, PartisanCounts>
where
    I: IntoIterator<Item = (&'a str, &'a [S])>,
    S: AsRef<str> + 'a,
{
    let mut counts: BTreeMap<String, PartisanCounts> = BTreeMap::new();
    for (user, hashtags) in tweets {
        for tag in hashtags {
            if let Some(polarity) = lexicon.polarity_of(tag.as_ref()) {
                let entry = counts.entry(user.to_string()).or_default();
                match polarity {
                    Polarity::Democrat => entry.dem += 1,
                    Polarity::Republican => entry.rep += 1,
                }
            }
        }
    }
    counts
}

/// Polarization `(rep - dem) / (rep + dem)` in `[-1, 1]`; undefined (an
/// error) for users with no partisan hashtags.
pub fn polarization<T: Real>(dem: u64, rep: u64) -> Result<T, PartisanError> {
    let total = dem + rep;
    if total == 0 {
        return Err(PartisanError::Unengaged(String::new()));
    }
    let dem = from_u64::<T>(dem);
    let rep = from_u64::<T>(rep);
    Ok((rep - dem) / (rep + dem))
}

/// Engagement: total volume of partisan hashtags used.
pub fn engagement(dem: u64, rep: u64) -> u64 {
    dem + rep
}

/// Classification thresholds; the polarity boundary is inclusive on both
/// sides.
pub const DEFAULT_POLARITY_THRESHOLD: f64 = 0.4;
pub const DEFAULT_HUMAN_MAX_BOTNESS: f64 = 0.2;
pub const DEFAULT_BOT_MIN_BOTNESS: f64 = 0.6;

/// Classifies a user's polarity from their hashtag counts.
pub fn classify_polarity<T: Real>(dem: u64, rep: u64, threshold: T) -> PolarityClass {
    if dem + rep == 0 {
        return PolarityClass::Unengaged;
    }
    let p: T = polarization(dem, rep).expect("engaged user");
    if p <= -threshold {
        PolarityClass::Democrat
    } else if p >= threshold {
        PolarityClass::Republican
    } else {
        PolarityClass::Unpolarized
    }
}

/// Per-user aggregates joined from the user table, hashtag counts and
/// cascade bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct UserRecord<T> {
    pub user_id: String,
    pub dem_count: u64,
    pub rep_count: u64,
    /// Likelihood of being a bot, in [0, 1]; absent for protected users.
    pub botness: Option<T>,
    pub protected: bool,
    pub suspended: bool,
    pub followers: u64,
    pub statuses_total: u64,
    pub retweets_authored: u64,
    pub favorites_total: u64,
    pub cascades_started: u64,
    pub mean_initiated_cascade_size: Option<T>,
}

impl<T: Real> UserRecord<T> {
    pub fn new(user_id: impl Into<String>) -> Self {
        Self {
            user_id: user_id.into(),
            dem_count: 0,
            rep_count: 0,
            botness: None,
            protected: false,
            suspended: false,
            followers: 0,
            statuses_total: 0,
            retweets_authored: 0,
            favorites_total: 0,
            cascades_started: 0,
            mean_initiated_cascade_size: None,
        }
    }

    pub fn engagement(&self) -> u64 {
        engagement(self.dem_count, self.rep_count)
    }

    pub fn polarization(&self) -> Result<T, PartisanError> {
        polarization(self.dem_count, self.rep_count)
            .map_err(|_| PartisanError::Unengaged(self.user_id.clone()))
    }
}

/// Population classification: suspension overrides protection, which
/// overrides the botness thresholds (bot at `bot_min` and above, human at
/// `human_max` and below, otherwise other). Errors when an unflagged user
/// has no botness score.
pub fn classify_population<T: Real>(
    record: &UserRecord<T>,
    human_max: T,
    bot_min: T,
) -> Result<PopulationClass, PartisanError> {
    if record.suspended {
        return Ok(PopulationClass::Suspended);
    }
    if record.protected {
        return Ok(PopulationClass::Protected);
    }
    match record.botness {
        None => Err(PartisanError::MissingBotness(record.user_id.clone())),
        Some(score) if score >= bot_min => Ok(PopulationClass::Bot),
        Some(score) if score <= human_max => Ok(PopulationClass::Human),
        Some(_) => Ok(PopulationClass::Other),
    }
}

/// Mean initiated cascade size: for each user who authored at least one
/// cascade root, the mean over their cascades of `size - 1` (the number of
/// users who reposted). Users who never started a cascade get no entry.
pub fn mean_initiated_cascade_size<T: Real>(cascades: &[Cascade<T>]) -> BTreeMap<String, T> {
    let mut sums: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    for cascade in cascades {
        let entry = sums.entry(cascade.root().user_id.clone()).or_insert((0, 0));
        entry.0 += (cascade.len() - 1) as u64;
        entry.1 += 1;
    }
    sums.into_iter()
        .map(|(user, (total, count))| (user, from_u64::<T>(total) / from_u64(count)))
        .collect()
}

/// Number of cascades each user started.
pub fn cascades_started<T: Real>(cascades: &[Cascade<T>]) -> BTreeMap<String, u64> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for cascade in cascades {
        *counts.entry(cascade.root().user_id.clone()).or_insert(0) += 1;
    }
    counts
}

/// Complementary CDF of a sample: for each distinct value, the fraction of
/// values greater than or equal to it, plus mean and median. An empty sample
/// yields an empty table with `count = 0` and no statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct CcdfTable<T> {
    /// `(value, fraction >= value)` sorted by value ascending.
    pub points: Vec<(T, T)>,
    pub count: usize,
    pub mean: Option<T>,
    pub median: Option<T>,
}

pub fn ccdf<T: Real>(values: &[T]) -> CcdfTable<T> {
    let mut sorted: Vec<T> = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("CCDF values must not be NaN"));
    let n = sorted.len();
    if n == 0 {
        return CcdfTable {
            points: Vec::new(),
            count: 0,
            mean: None,
            median: None,
        };
    }
    let nf = from_count::<T>(n);
    let mut points: Vec<(T, T)> = Vec::new();
    let mut index = 0;
    while index < n {
        let value = sorted[index];
        // fraction >= value counts everything from the first occurrence up
        let fraction = from_count::<T>(n - index) / nf;
        points.push((value, fraction));
        while index < n && sorted[index] == value {
            index += 1;
        }
    }
    let mean = sorted.iter().fold(T::zero(), |acc, &v| acc + v) / nf;
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / from_count::<T>(2)
    };
    CcdfTable {
        points,
        count: n,
        mean: Some(mean),
        median: Some(median),
    }
}

/// A user joined with their classifications and (optional) influence score;
/// the unit record of the reporting pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifiedUser<T> {
    pub record: UserRecord<T>,
    pub polarity: PolarityClass,
    /// `None` when the population is unknowable (no flags, no botness).
    pub population: Option<PopulationClass>,
    pub polarization: Option<T>,
    pub influence: Option<T>,
    pub influence_percentile: Option<T>,
}

/// Which partition of users a summary is computed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grouping {
    Population,
    Polarity,
}

/// Metrics summarized per group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Metric {
    CascadesStarted,
    RetweetsAuthored,
    Followers,
    Favorites,
    Engagement,
    Influence,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::CascadesStarted,
        Metric::RetweetsAuthored,
        Metric::Followers,
        Metric::Favorites,
        Metric::Engagement,
        Metric::Influence,
    ];
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self {
            Metric::CascadesStarted => "cascades_started",
            Metric::RetweetsAuthored => "retweets_authored",
            Metric::Followers => "followers",
            Metric::Favorites => "favorites",
            Metric::Engagement => "engagement",
            Metric::Influence => "influence",
        };
        f.write_str(label)
    }
}

fn metric_value<T: Real>(user: &ClassifiedUser<T>, metric: Metric) -> Option<T> {
    match metric {
        Metric::CascadesStarted => Some(from_u64(user.record.cascades_started)),
        Metric::RetweetsAuthored => Some(from_u64(user.record.retweets_authored)),
        Metric::Followers => Some(from_u64(user.record.followers)),
        Metric::Favorites => Some(from_u64(user.record.favorites_total)),
        Metric::Engagement => Some(from_u64(user.record.engagement())),
        Metric::Influence => user.influence,
    }
}

fn group_label<T: Real>(user: &ClassifiedUser<T>, grouping: Grouping) -> Option<String> {
    match grouping {
        Grouping::Population => user.population.map(|p| p.to_string()),
        Grouping::Polarity => Some(user.polarity.to_string()),
    }
}

/// CCDF tables (plus mean/median) for every metric within every group of the
/// chosen partition. Groups with no data still appear, flagged by their
/// empty table.
pub fn distribution_summaries<T: Real>(
    users: &[ClassifiedUser<T>],
    grouping: Grouping,
) -> BTreeMap<(String, String), CcdfTable<T>> {
    let group_names: Vec<String> = match grouping {
        Grouping::Population => [
            PopulationClass::Human,
            PopulationClass::Bot,
            PopulationClass::Protected,
            PopulationClass::Suspended,
            PopulationClass::Other,
        ]
        .iter()
        .map(|p| p.to_string())
        .collect(),
        Grouping::Polarity => [
            PolarityClass::Democrat,
            PolarityClass::Republican,
            PolarityClass::Unpolarized,
            PolarityClass::Unengaged,
        ]
        .iter()
        .map(|p| p.to_string())
        .collect(),
    };

    let mut tables = BTreeMap::new();
    for group in &group_names {
        for metric in Metric::ALL {
            let values: Vec<T> = users
                .iter()
                .filter(|u| group_label(u, grouping).as_deref() == Some(group.as_str()))
                .filter_map(|u| metric_value(u, metric))
                .collect();
            tables.insert((group.clone(), metric.to_string()), ccdf(&values));
        }
    }
    tables
}

/// Cross-tabulation of polarity rows against population columns, the
/// bookkeeping behind population-by-polarization tables. Integer accounting:
/// every column's rows sum back to its totals, and the per-column cells sum
/// across columns to the `all` column.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PolarityBreakdown {
    pub total: u64,
    pub polarized: u64,
    pub democrat: u64,
    pub republican: u64,
}

pub fn population_table<T: Real>(users: &[ClassifiedUser<T>]) -> BTreeMap<String, PolarityBreakdown> {
    let mut table: BTreeMap<String, PolarityBreakdown> = BTreeMap::new();
    for key in [
        "all",
        "protected",
        "human",
        "suspended",
        "bot",
        "other",
        "unscored",
    ] {
        table.insert(key.to_string(), PolarityBreakdown::default());
    }
    for user in users {
        let column = match user.population {
            Some(p) => p.to_string(),
            None => "unscored".to_string(),
        };
        for key in ["all".to_string(), column] {
            let cell = table.get_mut(&key).expect("column exists");
            cell.total += 1;
            match user.polarity {
                PolarityClass::Democrat => {
                    cell.polarized += 1;
                    cell.democrat += 1;
                }
                PolarityClass::Republican => {
                    cell.polarized += 1;
                    cell.republican += 1;
                }
                _ => {}
            }
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::CascadeEvent;

    fn lexicon() -> PartisanLexicon {
        PartisanLexicon::from_entries(vec![
            ("imwithher", Polarity::Democrat),
            ("nevertrump", Polarity::Democrat),
            ("trump2016", Polarity::Republican),
            ("neverhillary", Polarity::Republican),
        ])
        .unwrap()
    }

    #[test]
    fn lexicon_rejects_conflicts() {
        let err = PartisanLexicon::from_entries(vec![
            ("maga", Polarity::Republican),
            ("#MAGA", Polarity::Democrat),
        ])
        .unwrap_err();
        assert_eq!(err, PartisanError::ConflictingHashtag("maga".into()));
    }

    #[test]
    fn counting_single_polarity() {
        let tags = vec!["ImWithHer".to_string()];
        let counts = count_partisan_hashtags(vec![("u1", tags.as_slice())], &lexicon());
        assert_eq!(counts["u1"], PartisanCounts { dem: 1, rep: 0 });
    }

    #[test]
    fn counting_both_polarities_in_one_tweet() {
        let tags = vec!["nevertrump".to_string(), "neverhillary".to_string()];
        let counts = count_partisan_hashtags(vec![("u1", tags.as_slice())], &lexicon());
        assert_eq!(counts["u1"], PartisanCounts { dem: 1, rep: 1 });
    }

    #[test]
    fn counting_ignores_unknown_tags() {
        let tags = vec!["mondaymotivation".to_string()];
        let counts = count_partisan_hashtags(vec![("u1", tags.as_slice())], &lexicon());
        assert!(counts.is_empty());
    }

    #[test]
    fn counting_every_occurrence() {
        let t1 = vec!["trump2016".to_string(), "trump2016".to_string()];
        let counts = count_partisan_hashtags(vec![("u1", t1.as_slice())], &lexicon());
        assert_eq!(counts["u1"], PartisanCounts { dem: 0, rep: 2 });
    }

    #[test]
    fn polarization_formula() {
        assert_eq!(polarization::<f64>(5, 0).unwrap(), -1.0);
        assert_eq!(polarization::<f64>(2, 2).unwrap(), 0.0);
        assert_eq!(polarization::<f64>(1, 3).unwrap(), 0.5);
        assert!(polarization::<f64>(0, 0).is_err());
    }

    #[test]
    fn engagement_is_total_volume() {
        assert_eq!(engagement(0, 0), 0);
        assert_eq!(engagement(2, 3), 5);
    }

    #[test]
    fn polarity_boundaries_inclusive() {
        // P = -0.4 exactly: dem 7, rep 3
        assert_eq!(classify_polarity::<f64>(7, 3, 0.4), PolarityClass::Democrat);
        assert_eq!(classify_polarity::<f64>(3, 7, 0.4), PolarityClass::Republican);
        // P = 0.39 stays unpolarized: (139 - 61) / 200
        assert_eq!(
            classify_polarity::<f64>(61, 139, 0.4),
            PolarityClass::Unpolarized
        );
        assert_eq!(classify_polarity::<f64>(0, 0, 0.4), PolarityClass::Unengaged);
    }

    #[test]
    fn population_thresholds_inclusive() {
        let mut user = UserRecord::<f64>::new("u");
        user.botness = Some(0.6);
        assert_eq!(
            classify_population(&user, 0.2, 0.6).unwrap(),
            PopulationClass::Bot
        );
        user.botness = Some(0.2);
        assert_eq!(
            classify_population(&user, 0.2, 0.6).unwrap(),
            PopulationClass::Human
        );
        user.botness = Some(0.35);
        assert_eq!(
            classify_population(&user, 0.2, 0.6).unwrap(),
            PopulationClass::Other
        );
    }

    #[test]
    fn population_precedence_and_missing() {
        let mut user = UserRecord::<f64>::new("u");
        user.suspended = true;
        user.protected = true;
        user.botness = Some(0.9);
        assert_eq!(
            classify_population(&user, 0.2, 0.6).unwrap(),
            PopulationClass::Suspended
        );
        user.suspended = false;
        assert_eq!(
            classify_population(&user, 0.2, 0.6).unwrap(),
            PopulationClass::Protected
        );
        user.protected = false;
        user.botness = None;
        assert_eq!(
            classify_population(&user, 0.2, 0.6),
            Err(PartisanError::MissingBotness("u".into()))
        );
    }

    fn cascade_of_size(id: &str, user: &str, n: usize) -> Cascade<f64> {
        let mut events = vec![CascadeEvent::new(format!("{id}:0"), user, 0.0, 1)];
        for k in 1..n {
            events.push(CascadeEvent::new(
                format!("{id}:{k}"),
                format!("rt{k}"),
                k as f64,
                1,
            ));
        }
        Cascade::new(id, events).unwrap()
    }

    #[test]
    fn initiated_cascade_sizes() {
        let cascades = vec![
            cascade_of_size("c1", "u1", 1),
            cascade_of_size("c2", "u2", 3),
            cascade_of_size("c3", "u2", 5),
        ];
        let means = mean_initiated_cascade_size(&cascades);
        assert_eq!(means["u1"], 0.0); // never retweeted
        assert_eq!(means["u2"], 3.0); // ((3-1)+(5-1))/2
        assert!(!means.contains_key("rt1"));
        let started = cascades_started(&cascades);
        assert_eq!(started["u1"], 1);
        assert_eq!(started["u2"], 2);
    }

    #[test]
    fn ccdf_examples() {
        let single = ccdf(&[5.0]);
        assert_eq!(single.points, vec![(5.0, 1.0)]);
        assert_eq!(single.mean, Some(5.0));
        assert_eq!(single.median, Some(5.0));

        let table = ccdf(&[1.0, 2.0, 2.0, 4.0]);
        // fraction >= 2 is 3 of 4
        assert_eq!(table.points, vec![(1.0, 1.0), (2.0, 0.75), (4.0, 0.25)]);
        assert_eq!(table.mean, Some(2.25));
        assert_eq!(table.median, Some(2.0));

        let empty = ccdf::<f64>(&[]);
        assert_eq!(empty.count, 0);
        assert!(empty.points.is_empty() && empty.mean.is_none() && empty.median.is_none());
    }

    fn classified(
        polarity: PolarityClass,
        population: Option<PopulationClass>,
    ) -> ClassifiedUser<f64> {
        ClassifiedUser {
            record: UserRecord::new("u"),
            polarity,
            population,
            polarization: None,
            influence: None,
            influence_percentile: None,
        }
    }

    #[test]
    fn population_table_row_sums() {
        let users = vec![
            classified(PolarityClass::Democrat, Some(PopulationClass::Human)),
            classified(PolarityClass::Democrat, Some(PopulationClass::Bot)),
            classified(PolarityClass::Republican, Some(PopulationClass::Bot)),
            classified(PolarityClass::Unengaged, Some(PopulationClass::Protected)),
            classified(PolarityClass::Unpolarized, Some(PopulationClass::Other)),
            classified(PolarityClass::Republican, None),
            classified(PolarityClass::Democrat, Some(PopulationClass::Suspended)),
        ];
        let table = population_table(&users);
        let all = &table["all"];
        assert_eq!(all.total, 7);
        assert_eq!(all.polarized, 5);
        assert_eq!(all.democrat, 3);
        assert_eq!(all.republican, 2);
        // exact integer accounting across columns
        let columns = ["protected", "human", "suspended", "bot", "other", "unscored"];
        let sum = |f: fn(&PolarityBreakdown) -> u64| -> u64 {
            columns.iter().map(|c| f(&table[*c])).sum()
        };
        assert_eq!(sum(|b| b.total), all.total);
        assert_eq!(sum(|b| b.polarized), all.polarized);
        assert_eq!(sum(|b| b.democrat), all.democrat);
        assert_eq!(sum(|b| b.republican), all.republican);
    }

    #[test]
    fn summaries_flag_empty_groups() {
        let users = vec![classified(PolarityClass::Democrat, Some(PopulationClass::Human))];
        let tables = distribution_summaries(&users, Grouping::Population);
        let bots = &tables[&("bot".to_string(), "followers".to_string())];
        assert_eq!(bots.count, 0);
        let humans = &tables[&("human".to_string(), "followers".to_string())];
        assert_eq!(humans.count, 1);
        // influence absent -> empty influence table even for humans
        let influence = &tables[&("human".to_string(), "influence".to_string())];
        assert_eq!(influence.count, 0);
    }
}
