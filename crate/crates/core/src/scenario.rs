//! Exhaustive enumeration of diffusion scenarios and the factorial-time
//! influence oracle used to verify the recursive engine.
//!
//! A cascade of `n` events admits `(n-1)!` trees: event `j` may attach to any
//! of the `j` earlier events, independently of the rest of the tree. The
//! oracle walks every tree, weighs it by its probability, and accumulates the
//! path probability from each ancestor to each descendant. It shares nothing
//! with the column-recursive matrix in [`crate::influence`] beyond the
//! attachment probabilities themselves.

use crate::cascade::{parent_probabilities, Cascade, DecayConfig};
use crate::influence::InfluenceError;
use crate::scalar::Real;

/// Largest cascade the factorial enumeration accepts by default (7! = 5040
/// scenarios).
pub const DEFAULT_SCENARIO_CAP: usize = 8;

/// One admissible diffusion tree, encoded as a parent pointer per event.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionScenario<T> {
    parent: Vec<Option<usize>>,
    log_probability: T,
}

impl<T: Real> DiffusionScenario<T> {
    /// Parent of each event; `parent()[0]` is `None`, and `parent()[j] < j`.
    pub fn parent(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn log_probability(&self) -> T {
        self.log_probability
    }

    pub fn probability(&self) -> T {
        self.log_probability.exp()
    }
}

fn check_cap(n: usize, cap: usize) -> Result<(), InfluenceError> {
    if n > cap {
        return Err(InfluenceError::CascadeTooLarge { n, cap });
    }
    Ok(())
}

/// Attachment probabilities for every event: `columns[j][i]` is the
/// probability that event `j` reposts event `i`.
fn probability_columns<T: Real>(
    cascade: &Cascade<T>,
    cfg: &DecayConfig<T>,
) -> Result<Vec<Vec<T>>, InfluenceError> {
    (1..cascade.len())
        .map(|j| parent_probabilities(cascade, j, cfg).map_err(InfluenceError::from))
        .collect()
}

/// Every diffusion tree consistent with the cascade's temporal order,
/// together with its log probability. Exactly `(n-1)!` scenarios; their
/// probabilities sum to one.
pub fn enumerate_scenarios<T: Real>(
    cascade: &Cascade<T>,
    cfg: &DecayConfig<T>,
    cap: usize,
) -> Result<Vec<DiffusionScenario<T>>, InfluenceError> {
    let n = cascade.len();
    check_cap(n, cap)?;
    let columns = probability_columns(cascade, cfg)?;
    let log_columns: Vec<Vec<T>> = columns
        .iter()
        .map(|col| col.iter().map(|p| p.ln()).collect())
        .collect();

    let total: usize = (1..n).product();
    let mut scenarios = Vec::with_capacity(total);
    for code in 0..total {
        // mixed-radix decode: digit j-1 has radix j and selects the parent
        let mut rest = code;
        let mut parent = vec![None; n];
        let mut log_probability = T::zero();
        for j in 1..n {
            let choice = rest % j;
            rest /= j;
            parent[j] = Some(choice);
            log_probability = log_probability + log_columns[j - 1][choice];
        }
        scenarios.push(DiffusionScenario {
            parent,
            log_probability,
        });
    }
    Ok(scenarios)
}

/// Brute-force tweet influence: enumerates every scenario and averages the
/// per-tree path probabilities. Exponential in `n`; the reference the fast
/// engine is checked against.
pub fn oracle_influence<T: Real>(
    cascade: &Cascade<T>,
    cfg: &DecayConfig<T>,
    cap: usize,
) -> Result<Vec<T>, InfluenceError> {
    let n = cascade.len();
    check_cap(n, cap)?;
    let columns = probability_columns(cascade, cfg)?;

    let mut phi = vec![T::zero(); n];
    let total: usize = (1..n).product();
    let mut parent = vec![0usize; n];
    for code in 0..total {
        let mut rest = code;
        let mut tree_probability = T::one();
        for j in 1..n {
            let choice = rest % j;
            rest /= j;
            parent[j] = choice;
            tree_probability = tree_probability * columns[j - 1][choice];
        }
        // For every descendant k, walk up to each ancestor accumulating the
        // product of edge probabilities along the path.
        for k in 1..n {
            let mut path_probability = T::one();
            let mut node = k;
            loop {
                let up = parent[node];
                path_probability = path_probability * columns[node - 1][up];
                phi[up] = phi[up] + tree_probability * path_probability;
                if up == 0 {
                    break;
                }
                node = up;
            }
        }
    }
    Ok(phi)
}
