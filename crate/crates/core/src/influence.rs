//! Influence estimation over all admissible diffusion trees of a cascade.
//!
//! The pairwise score `m_ij` is the expected probability mass of a path from
//! event `i` to event `j`, marginalized over every tree consistent with the
//! temporal order. It satisfies the recursion
//!
//! ```text
//! m_ij = sum_{k=i}^{j-1} m_ik * p_kj^2      (i < j)
//! m_ii = 1,  m_ij = 0 for i > j
//! ```
//!
//! and is computed column by column: column `j` is the principal `j x j`
//! block of `M` applied to the squared attachment probabilities of event `j`.
//! Total work is O(n^3) for a cascade of `n` events.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::cascade::{attachment_softmax, Cascade, CascadeError, DecayConfig};
use crate::scalar::{from_count, from_u64, Real};
use crate::stats::average_ranks;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InfluenceError {
    #[error(transparent)]
    Cascade(#[from] CascadeError),
    #[error("cascade of {n} events exceeds the scenario cap of {cap}")]
    CascadeTooLarge { n: usize, cap: usize },
    #[error("user {0} has no recorded events")]
    UnknownUser(String),
}

/// Upper-triangular matrix of pairwise influence scores.
///
/// `m_ii = 1`, `m_ij = 0` below the diagonal, and every entry lies in
/// `[0, 1]`: each is an expectation of path probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseInfluenceMatrix<T> {
    n: usize,
    data: Vec<T>, // row-major n x n
}

impl<T: Real> PairwiseInfluenceMatrix<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    /// Row `i` as a full-length slice (zeros below the diagonal).
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

/// Pairwise influence of every event over every later event (the matrix `M`).
pub fn pairwise_influence<T: Real>(
    cascade: &Cascade<T>,
    cfg: &DecayConfig<T>,
) -> Result<PairwiseInfluenceMatrix<T>, CascadeError> {
    let n = cascade.len();
    let mut data = vec![T::zero(); n * n];
    for i in 0..n {
        data[i * n + i] = T::one();
    }
    let log_weights: Vec<T> = cascade
        .events()
        .iter()
        .map(|e| (from_u64::<T>(e.followers) + cfg.smoothing).ln())
        .collect();
    let timestamps: Vec<T> = cascade.events().iter().map(|e| e.timestamp).collect();

    // `column` holds p_kj while normalizing, then the squared probabilities.
    let mut column = vec![T::zero(); n];
    for j in 1..n {
        attachment_softmax(&log_weights, &timestamps, j, cfg.r, &mut column[..j])?;
        for p in column.iter_mut().take(j) {
            *p = *p * *p;
        }
        for i in 0..j {
            let row = &data[i * n + i..i * n + j];
            data[i * n + j] = dot(row, &column[i..j]);
        }
    }
    Ok(PairwiseInfluenceMatrix { n, data })
}

/// Unrolled dot product; four lanes break the add-latency chain in the O(n^3)
/// inner loop without changing results across runs or thread counts.
#[inline]
fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [T::zero(); 4];
    let chunks = a.len() / 4 * 4;
    let mut k = 0;
    while k < chunks {
        acc[0] = acc[0] + a[k] * b[k];
        acc[1] = acc[1] + a[k + 1] * b[k + 1];
        acc[2] = acc[2] + a[k + 2] * b[k + 2];
        acc[3] = acc[3] + a[k + 3] * b[k + 3];
        k += 4;
    }
    let mut tail = T::zero();
    while k < a.len() {
        tail = tail + a[k] * b[k];
        k += 1;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Tweet influence: expected number of direct and indirect reposts of each
/// event, `phi(v_i) = sum_{k > i} m_ik`. The last event always scores zero.
pub fn tweet_influence<T: Real>(matrix: &PairwiseInfluenceMatrix<T>) -> Vec<T> {
    let n = matrix.n();
    (0..n)
        .map(|i| {
            matrix.row(i)[i + 1..]
                .iter()
                .fold(T::zero(), |acc, &v| acc + v)
        })
        .collect()
}

/// User influence: the mean tweet influence over every event the user
/// authored, pooled across the whole corpus.
///
/// Feed it `(user_id, phi)` pairs in a deterministic order (cascades sorted by
/// id, events by index) and the reduction is reproducible bit for bit.
pub fn user_influence<'a, T, I>(events: I) -> BTreeMap<String, T>
where
    T: Real,
    I: IntoIterator<Item = (&'a str, T)>,
{
    let mut sums: BTreeMap<String, (T, u64)> = BTreeMap::new();
    for (user, phi) in events {
        let entry = sums
            .entry(user.to_string())
            .or_insert((T::zero(), 0));
        entry.0 = entry.0 + phi;
        entry.1 += 1;
    }
    sums.into_iter()
        .map(|(user, (sum, count))| (user, sum / from_u64(count)))
        .collect()
}

/// Influence of a single user, erroring for users with no events.
pub fn user_influence_of<T: Real>(
    scores: &BTreeMap<String, T>,
    user: &str,
) -> Result<T, InfluenceError> {
    scores
        .get(user)
        .copied()
        .ok_or_else(|| InfluenceError::UnknownUser(user.to_string()))
}

/// Percentile normalization: 1 for the most influential user, 0 for the
/// least, `(rank - 1) / (N - 1)` with average ranks on ties. A single user
/// scores 1.
pub fn influence_percentiles<T: Real>(scores: &BTreeMap<String, T>) -> BTreeMap<String, T> {
    let n = scores.len();
    if n == 0 {
        return BTreeMap::new();
    }
    if n == 1 {
        let user = scores.keys().next().unwrap().clone();
        return BTreeMap::from([(user, T::one())]);
    }
    let values: Vec<T> = scores.values().copied().collect();
    let ranks = average_ranks(&values);
    let denom = from_count::<T>(n - 1);
    scores
        .keys()
        .zip(ranks)
        .map(|(user, rank)| (user.clone(), (rank - T::one()) / denom))
        .collect()
}

/// Tweet influence of every event of one cascade, index-aligned with
/// `cascade.events()`.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadePhi<T> {
    pub cascade_id: String,
    pub phi: Vec<T>,
}

/// Corpus-level influence summary.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceReport<T> {
    /// Per-event influence, one entry per cascade in input order.
    pub per_event: Vec<CascadePhi<T>>,
    /// Mean tweet influence per user.
    pub per_user: BTreeMap<String, T>,
    /// Percentile of each user's influence in `[0, 1]`.
    pub percentile: BTreeMap<String, T>,
}

/// Runs the full per-cascade computation over a corpus and aggregates user
/// influence. Cascades are processed in parallel; aggregation is an ordered
/// reduction over the input order, so results do not depend on thread count.
pub fn build_report<T: Real>(
    cascades: &[Cascade<T>],
    cfg: &DecayConfig<T>,
) -> Result<InfluenceReport<T>, CascadeError> {
    let per_event: Vec<CascadePhi<T>> = cascades
        .par_iter()
        .map(|cascade| {
            let matrix = pairwise_influence(cascade, cfg)?;
            Ok(CascadePhi {
                cascade_id: cascade.id().to_string(),
                phi: tweet_influence(&matrix),
            })
        })
        .collect::<Result<_, CascadeError>>()?;

    let per_user = user_influence(
        cascades
            .iter()
            .zip(&per_event)
            .flat_map(|(cascade, scores)| {
                cascade
                    .events()
                    .iter()
                    .zip(&scores.phi)
                    .map(|(event, &phi)| (event.user_id.as_str(), phi))
            }),
    );
    let percentile = influence_percentiles(&per_user);
    Ok(InfluenceReport {
        per_event,
        per_user,
        percentile,
    })
}
