//! Cascade data structures, validation, and the attachment-probability model
//! shared by everything downstream.
//!
//! A retweet cascade exposes only who posted and when; the tree of who
//! retweeted whom is latent. The probability that event `j` directly reposts
//! event `i` is a softmax over all earlier events, weighted by the author's
//! follower count and an exponential decay in the elapsed time:
//!
//! ```text
//! p_ij = (m_i + s) * exp(-r (t_j - t_i)) / sum_{k<j} (m_k + s) * exp(-r (t_j - t_k))
//! ```
//!
//! where `m_i` is the follower count of the author of event `i`, `r` the
//! temporal decay rate (per second) and `s` an additive smoothing that keeps
//! the distribution defined when every candidate has zero followers.

use thiserror::Error;

use crate::scalar::{from_f64, from_u64, Real};

/// Default temporal decay rate, in 1/seconds.
pub const DEFAULT_DECAY: f64 = 6.8e-4;

/// Default additive follower smoothing (every user implicitly follows
/// themselves). Set it to zero for the strict unsmoothed model; cascades whose
/// prefix has only zero-follower authors are then degenerate.
pub const DEFAULT_SMOOTHING: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CascadeError {
    #[error("cascade has no events")]
    EmptyCascade,
    #[error("event {index}: timestamp is not finite")]
    NonFiniteTimestamp { index: usize },
    #[error("event {index}: negative followers count")]
    NegativeFollowers { index: usize },
    #[error("event {event}: all attachment weights are zero (zero followers and zero smoothing)")]
    DegenerateWeights { event: usize },
}

/// One tweet or retweet inside a cascade.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeEvent<T> {
    /// 0-based position within the cascade, assigned at validation.
    pub event_index: usize,
    pub tweet_id: String,
    pub user_id: String,
    /// Seconds; any epoch, only differences matter.
    pub timestamp: T,
    /// The author's follower count (their local influence).
    pub followers: u64,
}

impl<T: Real> CascadeEvent<T> {
    pub fn new(
        tweet_id: impl Into<String>,
        user_id: impl Into<String>,
        timestamp: T,
        followers: u64,
    ) -> Self {
        Self {
            event_index: 0,
            tweet_id: tweet_id.into(),
            user_id: user_id.into(),
            timestamp,
            followers,
        }
    }
}

/// A time-ordered retweet cascade. The first event is the original tweet.
///
/// Construction canonicalizes the event list: events are stably sorted by
/// timestamp (equal timestamps keep their input order) and `event_index` is
/// reassigned `0..n`. Instances are immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct Cascade<T> {
    cascade_id: String,
    events: Vec<CascadeEvent<T>>,
}

impl<T: Real> Cascade<T> {
    /// Validates and canonicalizes a raw event list.
    pub fn new(
        cascade_id: impl Into<String>,
        mut events: Vec<CascadeEvent<T>>,
    ) -> Result<Self, CascadeError> {
        if events.is_empty() {
            return Err(CascadeError::EmptyCascade);
        }
        for (index, event) in events.iter().enumerate() {
            if !event.timestamp.is_finite() {
                return Err(CascadeError::NonFiniteTimestamp { index });
            }
        }
        // Stable: equal timestamps preserve input order.
        events.sort_by(|a, b| {
            a.timestamp
                .partial_cmp(&b.timestamp)
                .expect("finite timestamps are comparable")
        });
        for (index, event) in events.iter_mut().enumerate() {
            event.event_index = index;
        }
        Ok(Self {
            cascade_id: cascade_id.into(),
            events,
        })
    }

    pub fn id(&self) -> &str {
        &self.cascade_id
    }

    pub fn events(&self) -> &[CascadeEvent<T>] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        false // n >= 1 by construction
    }

    /// The original tweet.
    pub fn root(&self) -> &CascadeEvent<T> {
        &self.events[0]
    }
}

/// Attachment-model hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayConfig<T> {
    /// Temporal decay rate in 1/seconds; must be >= 0.
    pub r: T,
    /// Additive smoothing on follower counts; must be >= 0.
    pub smoothing: T,
}

impl<T: Real> DecayConfig<T> {
    pub fn new(r: T, smoothing: T) -> Self {
        assert!(r >= T::zero(), "decay rate must be non-negative");
        assert!(smoothing >= T::zero(), "smoothing must be non-negative");
        Self { r, smoothing }
    }
}

impl<T: Real> Default for DecayConfig<T> {
    fn default() -> Self {
        Self {
            r: from_f64(DEFAULT_DECAY),
            smoothing: from_f64(DEFAULT_SMOOTHING),
        }
    }
}

/// Probability that event `j` is a direct repost of each earlier event.
///
/// Returns `p[i]` for `i = 0..j`; the entries sum to one. `j` must be in
/// `1..n`. Fails with [`CascadeError::DegenerateWeights`] when every candidate
/// weight is exactly zero, which can only happen with `smoothing = 0` and an
/// all-zero-follower prefix.
pub fn parent_probabilities<T: Real>(
    cascade: &Cascade<T>,
    j: usize,
    cfg: &DecayConfig<T>,
) -> Result<Vec<T>, CascadeError> {
    assert!(
        j >= 1 && j < cascade.len(),
        "event index {j} out of range 1..{}",
        cascade.len()
    );
    let log_weights: Vec<T> = cascade.events()[..j]
        .iter()
        .map(|e| (from_u64::<T>(e.followers) + cfg.smoothing).ln())
        .collect();
    let timestamps: Vec<T> = cascade.events().iter().map(|e| e.timestamp).collect();
    let mut out = vec![T::zero(); j];
    attachment_softmax(&log_weights, &timestamps, j, cfg.r, &mut out)?;
    Ok(out)
}

/// Softmax of `log_weights[i] - r * (t_j - t_i)` over `i < j`, written into
/// `out[..j]`. The max exponent is subtracted first so multi-day gaps cannot
/// underflow the whole distribution.
pub(crate) fn attachment_softmax<T: Real>(
    log_weights: &[T],
    timestamps: &[T],
    j: usize,
    r: T,
    out: &mut [T],
) -> Result<(), CascadeError> {
    debug_assert!(j >= 1 && out.len() >= j && log_weights.len() >= j);
    let t_j = timestamps[j];
    let mut max_exponent = T::neg_infinity();
    for i in 0..j {
        let exponent = log_weights[i] - r * (t_j - timestamps[i]);
        out[i] = exponent;
        if exponent > max_exponent {
            max_exponent = exponent;
        }
    }
    if max_exponent == T::neg_infinity() {
        return Err(CascadeError::DegenerateWeights { event: j });
    }
    let mut total = T::zero();
    for value in out.iter_mut().take(j) {
        let e = (*value - max_exponent).exp();
        *value = e;
        total = total + e;
    }
    for value in out.iter_mut().take(j) {
        *value = *value / total;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn event(user: &str, t: f64, followers: u64) -> CascadeEvent<f64> {
        CascadeEvent::new(format!("t-{user}-{t}"), user, t, followers)
    }

    #[test]
    fn single_event_is_identity() {
        let c = Cascade::new("c1", vec![event("a", 10.0, 5)]).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.root().user_id, "a");
        assert_eq!(c.events()[0].event_index, 0);
    }

    #[test]
    fn equal_timestamps_keep_input_order() {
        let c = Cascade::new("c1", vec![event("a", 5.0, 0), event("b", 5.0, 0)]).unwrap();
        assert_eq!(c.events()[0].user_id, "a");
        assert_eq!(c.events()[1].user_id, "b");
    }

    #[test]
    fn out_of_order_events_are_sorted() {
        // Oracle: sort the (timestamp, user) pairs by hand.
        let raw = vec![
            event("d", 40.0, 1),
            event("a", 0.0, 1),
            event("c", 30.0, 1),
            event("e", 55.0, 1),
            event("b", 10.0, 1),
        ];
        let c = Cascade::new("c1", raw).unwrap();
        let users: Vec<&str> = c.events().iter().map(|e| e.user_id.as_str()).collect();
        assert_eq!(users, ["a", "b", "c", "d", "e"]);
        let indices: Vec<usize> = c.events().iter().map(|e| e.event_index).collect();
        assert_eq!(indices, [0, 1, 2, 3, 4]);
    }

    #[test]
    fn empty_cascade_rejected() {
        assert_eq!(
            Cascade::<f64>::new("c1", vec![]),
            Err(CascadeError::EmptyCascade)
        );
    }

    #[test]
    fn non_finite_timestamp_rejected() {
        let err = Cascade::new("c1", vec![event("a", f64::NAN, 1)]).unwrap_err();
        assert_eq!(err, CascadeError::NonFiniteTimestamp { index: 0 });
        let err = Cascade::new("c1", vec![event("a", 0.0, 1), event("b", f64::INFINITY, 1)])
            .unwrap_err();
        assert_eq!(err, CascadeError::NonFiniteTimestamp { index: 1 });
    }

    #[test]
    fn second_event_has_single_certain_parent() {
        let c = Cascade::new("c1", vec![event("a", 0.0, 3), event("b", 9.0, 7)]).unwrap();
        let p = parent_probabilities(&c, 1, &DecayConfig::default()).unwrap();
        assert_eq!(p, vec![1.0]);
    }

    #[test]
    fn equal_weights_split_evenly() {
        // two candidate parents with equal followers and equal gaps to t_j
        let c = Cascade::new(
            "c1",
            vec![event("a", 0.0, 4), event("b", 0.0, 4), event("c", 20.0, 4)],
        )
        .unwrap();
        let p = parent_probabilities(&c, 2, &DecayConfig::new(0.01, 0.0)).unwrap();
        assert_eq!(p, vec![0.5, 0.5]);
    }

    #[test]
    fn follower_ratio_drives_probabilities() {
        // r = 0, smoothing = 0, followers (3, 1): p = [0.75, 0.25] by direct
        // evaluation of the weight ratio.
        let c = Cascade::new(
            "c1",
            vec![event("a", 0.0, 3), event("b", 1.0, 1), event("c", 2.0, 9)],
        )
        .unwrap();
        let p = parent_probabilities(&c, 2, &DecayConfig::new(0.0, 0.0)).unwrap();
        assert!((p[0] - 0.75).abs() < 1e-12);
        assert!((p[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn degenerate_weights_error() {
        let c = Cascade::new("c1", vec![event("a", 0.0, 0), event("b", 1.0, 0)]).unwrap();
        let err = parent_probabilities(&c, 1, &DecayConfig::new(0.0, 0.0)).unwrap_err();
        assert_eq!(err, CascadeError::DegenerateWeights { event: 1 });
        // default smoothing keeps it defined
        let p = parent_probabilities(&c, 1, &DecayConfig::default()).unwrap();
        assert_eq!(p, vec![1.0]);
    }

    #[test]
    fn probabilities_sum_to_one_on_long_gaps() {
        // r * dt past 700 would underflow a naive exp; the shifted softmax
        // must still normalize.
        let c = Cascade::new(
            "c1",
            vec![
                event("a", 0.0, 1000),
                event("b", 2_000_000.0, 10),
                event("c", 4_000_000.0, 10),
            ],
        )
        .unwrap();
        let p = parent_probabilities(&c, 2, &DecayConfig::new(1e-2, 1.0)).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p[1] > p[0]);
    }
}
