//! Rank statistics shared by percentile normalization, Spearman correlation,
//! AUC scoring and the empirical-CDF rescaling.

use crate::scalar::{from_count, Real};

/// Ascending 1-based ranks with ties resolved to the mean rank of their block.
///
/// `average_ranks(&[5.0, 1.0, 3.0])` is `[3.0, 1.0, 2.0]`; four equal values
/// all rank 2.5.
pub fn average_ranks<T: Real>(values: &[T]) -> Vec<T> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .expect("rank values must be comparable (no NaN)")
    });

    let mut ranks = vec![T::zero(); n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // ranks start..end (0-based) share the mean of (start+1)..=end
        let mean_rank = from_count::<T>(start + 1 + end) / from_count::<T>(2);
        for &idx in &order[start..end] {
            ranks[idx] = mean_rank;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation over paired samples; ties get average ranks.
///
/// Returns `None` when fewer than two pairs are given or either side has zero
/// rank variance.
pub fn spearman<T: Real>(xs: &[T], ys: &[T]) -> Option<T> {
    assert_eq!(xs.len(), ys.len(), "paired samples must have equal length");
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let nf = from_count::<T>(n);
    let mx = rx.iter().fold(T::zero(), |acc, &v| acc + v) / nf;
    let my = ry.iter().fold(T::zero(), |acc, &v| acc + v) / nf;

    let mut cov = T::zero();
    let mut var_x = T::zero();
    let mut var_y = T::zero();
    for i in 0..n {
        let dx = rx[i] - mx;
        let dy = ry[i] - my;
        cov = cov + dx * dy;
        var_x = var_x + dx * dx;
        var_y = var_y + dy * dy;
    }
    let denom = (var_x * var_y).sqrt();
    if denom == T::zero() {
        return None;
    }
    Some(cov / denom)
}
