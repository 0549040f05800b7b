//! Decay-rate calibration: scores a candidate decay by how well attachment
//! probabilities predict observed follow edges, averaged over retweet events,
//! and linear-searches a grid of rates for the best mean AUC.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::cascade::{parent_probabilities, Cascade, CascadeError, DecayConfig};
use crate::scalar::{from_count, from_f64, Real};
use crate::stats::average_ranks;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalibrationError {
    #[error(transparent)]
    Cascade(#[from] CascadeError),
    #[error("user {0} cannot follow themselves")]
    SelfLoop(String),
    #[error("no event has both a followed and an unfollowed candidate parent")]
    NoScorableEvents,
}

/// Directed follow relationships: an edge `(follower, followee)` means the
/// follower sees — and can repost — the followee's tweets.
#[derive(Debug, Clone, Default)]
pub struct FollowGraph {
    followees: HashMap<String, HashSet<String>>,
    followers: HashMap<String, Vec<String>>,
    edge_count: usize,
}

impl FollowGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from `(follower, followee)` pairs; duplicates collapse,
    /// self-loops are rejected.
    pub fn from_edges<I, S>(edges: I) -> Result<Self, CalibrationError>
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut graph = Self::new();
        for (follower, followee) in edges {
            graph.add_edge(follower.into(), followee.into())?;
        }
        for list in graph.followers.values_mut() {
            list.sort();
            list.dedup();
        }
        Ok(graph)
    }

    fn add_edge(&mut self, follower: String, followee: String) -> Result<(), CalibrationError> {
        if follower == followee {
            return Err(CalibrationError::SelfLoop(follower));
        }
        if self
            .followees
            .entry(follower.clone())
            .or_default()
            .insert(followee.clone())
        {
            self.edge_count += 1;
            self.followers.entry(followee).or_default().push(follower);
        }
        Ok(())
    }

    pub fn follows(&self, follower: &str, followee: &str) -> bool {
        self.followees
            .get(follower)
            .is_some_and(|set| set.contains(followee))
    }

    /// Followers of a user, sorted by id.
    pub fn followers_of(&self, followee: &str) -> &[String] {
        self.followers
            .get(followee)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn follower_count(&self, followee: &str) -> usize {
        self.followers_of(followee).len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }
}

/// AUC of scores against binary labels via the rank statistic (Mann-Whitney),
/// ties taking average ranks. `None` when either class is empty.
pub fn auc<T: Real>(scores: &[T], labels: &[bool]) -> Option<T> {
    assert_eq!(scores.len(), labels.len(), "scores and labels must pair up");
    let positives = labels.iter().filter(|&&l| l).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return None;
    }
    let ranks = average_ranks(scores);
    let positive_rank_sum = ranks
        .iter()
        .zip(labels)
        .filter(|(_, &label)| label)
        .fold(T::zero(), |acc, (&rank, _)| acc + rank);
    let p = from_count::<T>(positives);
    let n = from_count::<T>(negatives);
    let two = from_count::<T>(2);
    Some((positive_rank_sum - p * (p + T::one()) / two) / (p * n))
}

/// Mean AUC of follow-edge prediction over every scorable retweet event.
///
/// For each event with at least two candidate parents, candidates are scored
/// by their attachment probability and labeled positive when the retweeter
/// follows them. Events whose candidates are all followed or all unfollowed
/// carry no ranking signal and are skipped.
pub fn edge_auc<T: Real>(
    cascades: &[Cascade<T>],
    follows: &FollowGraph,
    cfg: &DecayConfig<T>,
) -> Result<T, CalibrationError> {
    let mut total = T::zero();
    let mut events = 0u64;
    let mut labels: Vec<bool> = Vec::new();
    for cascade in cascades {
        for j in 1..cascade.len() {
            let retweeter = &cascade.events()[j].user_id;
            labels.clear();
            labels.extend(
                cascade.events()[..j]
                    .iter()
                    .map(|candidate| follows.follows(retweeter, &candidate.user_id)),
            );
            let positives = labels.iter().filter(|&&l| l).count();
            if positives == 0 || positives == labels.len() {
                continue;
            }
            let scores = parent_probabilities(cascade, j, cfg)?;
            let event_auc = auc(&scores, &labels).expect("both classes present");
            total = total + event_auc;
            events += 1;
        }
    }
    if events == 0 {
        return Err(CalibrationError::NoScorableEvents);
    }
    Ok(total / from_count(events as usize))
}

/// Outcome of the decay-rate search.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult<T> {
    /// `(r, mean AUC)` for every grid point, in grid order.
    pub grid: Vec<(T, T)>,
    pub best_r: T,
    pub best_auc: T,
}

/// Evaluates [`edge_auc`] at every grid point (concurrently) and returns the
/// argmax; AUC ties resolve to the smallest rate.
pub fn tune_decay<T: Real>(
    cascades: &[Cascade<T>],
    follows: &FollowGraph,
    grid: &[T],
    smoothing: T,
) -> Result<CalibrationResult<T>, CalibrationError> {
    assert!(!grid.is_empty(), "decay grid must not be empty");
    let evaluations: Vec<(T, T)> = grid
        .par_iter()
        .map(|&r| {
            edge_auc(cascades, follows, &DecayConfig::new(r, smoothing)).map(|score| (r, score))
        })
        .collect::<Result<_, CalibrationError>>()?;

    let (mut best_r, mut best_auc) = evaluations[0];
    for &(r, score) in &evaluations[1..] {
        if score > best_auc || (score == best_auc && r < best_r) {
            best_r = r;
            best_auc = score;
        }
    }
    Ok(CalibrationResult {
        grid: evaluations,
        best_r,
        best_auc,
    })
}

/// Logarithmically spaced grid from `lo` to `hi` inclusive.
pub fn log_grid<T: Real>(lo: f64, hi: f64, points: usize) -> Vec<T> {
    assert!(points >= 1 && lo > 0.0 && hi >= lo, "invalid grid bounds");
    if points == 1 {
        return vec![from_f64(lo)];
    }
    let (log_lo, log_hi) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| {
            let frac = i as f64 / (points - 1) as f64;
            from_f64((log_lo + frac * (log_hi - log_lo)).exp())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::CascadeEvent;

    #[test]
    fn auc_perfect_separation() {
        let a = auc(&[0.9, 0.1], &[true, false]).unwrap();
        assert_eq!(a, 1.0);
    }

    #[test]
    fn auc_all_tied_is_half() {
        let a = auc(&[0.3, 0.3, 0.3, 0.3], &[true, false, true, false]).unwrap();
        assert_eq!(a, 0.5);
    }

    #[test]
    fn auc_single_class_is_none() {
        assert!(auc(&[0.1, 0.9], &[true, true]).is_none());
        assert!(auc(&[0.1, 0.9], &[false, false]).is_none());
    }

    #[test]
    fn auc_matches_pairwise_oracle() {
        // brute-force O(P*N) comparison count
        let mut state = 1234567u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 40) as f64 / (1u64 << 24) as f64
        };
        for _ in 0..50 {
            let n = 200;
            let scores: Vec<f64> = (0..n).map(|_| (next() * 16.0).round() / 16.0).collect();
            let labels: Vec<bool> = (0..n).map(|_| next() > 0.6).collect();
            let positives = labels.iter().filter(|&&l| l).count();
            if positives == 0 || positives == n {
                continue;
            }
            let fast = auc(&scores, &labels).unwrap();
            let mut wins = 0.0f64;
            for i in 0..n {
                if !labels[i] {
                    continue;
                }
                for k in 0..n {
                    if labels[k] {
                        continue;
                    }
                    if scores[i] > scores[k] {
                        wins += 1.0;
                    } else if scores[i] == scores[k] {
                        wins += 0.5;
                    }
                }
            }
            let brute = wins / (positives as f64 * (n - positives) as f64);
            assert!((fast - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn label_reversal_flips_auc() {
        let scores = [0.1f64, 0.7, 0.4, 0.9, 0.2, 0.4];
        let labels = [false, true, false, true, true, false];
        let flipped: Vec<bool> = labels.iter().map(|l| !l).collect();
        let a = auc(&scores, &labels).unwrap();
        let b = auc(&scores, &flipped).unwrap();
        assert!((a + b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn follow_graph_rejects_self_loops() {
        let err = FollowGraph::from_edges(vec![("a", "a")]).unwrap_err();
        assert_eq!(err, CalibrationError::SelfLoop("a".into()));
    }

    #[test]
    fn follow_graph_counts() {
        let g =
            FollowGraph::from_edges(vec![("a", "b"), ("c", "b"), ("a", "b"), ("b", "a")]).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert!(g.follows("a", "b"));
        assert!(!g.follows("b", "c"));
        assert_eq!(g.followers_of("b"), ["a".to_string(), "c".to_string()]);
        assert_eq!(g.follower_count("a"), 1);
    }

    fn fixture() -> (Vec<Cascade<f64>>, FollowGraph) {
        // u1 and u2 retweet u0; u1 follows u0 but not u2, and arrives sooner
        // after u0 than after u2 would suggest, so a temporal model helps.
        let cascade = Cascade::new(
            "c0",
            vec![
                CascadeEvent::new("t0", "u0", 0.0, 10),
                CascadeEvent::new("t1", "u2", 50.0, 10),
                CascadeEvent::new("t2", "u1", 60.0, 10),
                CascadeEvent::new("t3", "u3", 1000.0, 10),
            ],
        )
        .unwrap();
        let follows = FollowGraph::from_edges(vec![
            ("u1", "u2"),
            ("u3", "u0"),
            ("u2", "u0"),
        ])
        .unwrap();
        (vec![cascade], follows)
    }

    #[test]
    fn edge_auc_requires_mixed_labels() {
        let (cascades, _) = fixture();
        let empty = FollowGraph::new();
        let err = edge_auc(&cascades, &empty, &DecayConfig::default()).unwrap_err();
        assert_eq!(err, CalibrationError::NoScorableEvents);
    }

    #[test]
    fn tune_single_point_grid() {
        let (cascades, follows) = fixture();
        let result = tune_decay(&cascades, &follows, &[1e-3], 1.0).unwrap();
        assert_eq!(result.grid.len(), 1);
        assert_eq!(result.best_r, 1e-3);
        assert_eq!(result.best_auc, result.grid[0].1);
    }

    #[test]
    fn log_grid_shape() {
        let grid: Vec<f64> = log_grid(1e-8, 3.0, 40);
        assert_eq!(grid.len(), 40);
        assert!((grid[0] - 1e-8).abs() < 1e-20);
        assert!((grid[39] - 3.0).abs() < 1e-12);
        for w in grid.windows(2) {
            assert!(w[1] > w[0]);
        }
    }
}
