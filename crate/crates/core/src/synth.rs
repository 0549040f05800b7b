//! Synthetic social graphs and continuous-time diffusions with known ground
//! truth, for benchmarking the influence estimator, plus a follow-constrained
//! corpus generator with a planted decay rate for calibration experiments.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::calibrate::FollowGraph;
use crate::cascade::{Cascade, CascadeEvent};
use crate::scalar::{from_f64, from_u64, Real};
use crate::stats::spearman;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("estimator evaluation needs at least 3 common nodes, found {found}")]
    TooFewPoints { found: usize },
    #[error("rank correlation is undefined on constant inputs")]
    ZeroVariance,
}

/// Directed social graph; an edge `i -> j` means content can diffuse from
/// `i` to `j` (`j` is exposed to `i`).
#[derive(Debug, Clone)]
pub struct SocialGraph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl SocialGraph {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    /// Out-neighbors of `node`, sorted ascending.
    pub fn neighbors(&self, node: u32) -> &[u32] {
        &self.targets[self.offsets[node as usize]..self.offsets[node as usize + 1]]
    }

    pub fn out_degree(&self, node: u32) -> usize {
        self.neighbors(node).len()
    }

    pub fn has_edge(&self, from: u32, to: u32) -> bool {
        self.neighbors(from).binary_search(&to).is_ok()
    }

    /// All edges in `(source, target)` order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n as u32)
            .flat_map(move |src| self.neighbors(src).iter().map(move |&dst| (src, dst)))
    }

    fn from_edge_set(n: usize, set: HashSet<(u32, u32)>) -> Self {
        let mut edges: Vec<(u32, u32)> = set.into_iter().collect();
        edges.sort_unstable();
        let mut offsets = vec![0usize; n + 1];
        for &(src, _) in &edges {
            offsets[src as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = edges.into_iter().map(|(_, dst)| dst).collect();
        Self { n, offsets, targets }
    }
}

/// Random directed graph: the edge count is drawn uniformly between `n/2`
/// and `n(n-1)` (all ordered pairs, self-loops excluded), then that many
/// distinct edges are drawn uniformly by rejection. Deterministic in `seed`.
pub fn generate_graph(n: usize, seed: u64) -> SocialGraph {
    assert!(n >= 2, "graph needs at least two nodes");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let min_edges = n.div_ceil(2);
    let max_edges = n * (n - 1);
    let edge_target = rng.random_range(min_edges..=max_edges);
    let mut set: HashSet<(u32, u32)> = HashSet::with_capacity(edge_target);
    while set.len() < edge_target {
        let src = rng.random_range(0..n as u32);
        let dst = rng.random_range(0..n as u32);
        if src != dst {
            set.insert((src, dst));
        }
    }
    SocialGraph::from_edge_set(n, set)
}

/// Diffusion-speed parameters: each edge draws a Weibull-distributed rate and
/// an exponential waiting time at that rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionParams {
    /// Weibull shape of the per-edge rate.
    pub shape: f64,
    /// Weibull scale of the per-edge rate.
    pub scale: f64,
}

impl Default for DiffusionParams {
    fn default() -> Self {
        Self {
            shape: 2.0,
            scale: 1.0,
        }
    }
}

/// One sampled diffusion: the observable cascade plus the hidden tree.
#[derive(Debug, Clone)]
pub struct SampledDiffusion<T> {
    pub cascade: Cascade<T>,
    /// Node id of each event, aligned with `cascade.events()`.
    pub nodes: Vec<u32>,
    /// Event position of each event's tree parent; `None` for the source.
    pub parent_position: Vec<Option<usize>>,
    /// Waiting time drawn on the tree edge entering each event; zero at the
    /// source.
    pub edge_wait: Vec<T>,
    /// Nodes reachable from each event in the shortest-path tree, aligned
    /// with `cascade.events()`. Leaves score 0; the source scores
    /// `cascade.len() - 1`.
    pub reach: Vec<u64>,
    pub source: u32,
    /// Set when the source reached no other node.
    pub isolated_source: bool,
}

/// Samples one diffusion from `source`.
///
/// Every edge `i -> j` draws a rate `r_ij ~ Weibull(shape, scale)` by inverse
/// transform and a waiting time `tau_ij = -ln(s)/r_ij`, `s ~ U(0,1)`; the
/// diffusion is the shortest-path tree of those waiting times, and event
/// timestamps are the arrival times. The random stream is derived from
/// `(seed, stream)`, so samples are independent of scheduling order.
pub fn sample_cascade<T: Real>(
    graph: &SocialGraph,
    source: u32,
    params: &DiffusionParams,
    seed: u64,
    stream: u64,
    cascade_id: impl Into<String>,
) -> SampledDiffusion<T> {
    assert!((source as usize) < graph.node_count(), "source not in graph");
    assert!(params.shape > 0.0 && params.scale > 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);

    let mut weights = vec![0.0f64; graph.edge_count()];
    let inv_shape = 1.0 / params.shape;
    for w in weights.iter_mut() {
        let u: f64 = rng.random();
        let rate = params.scale * (-(1.0 - u).ln()).powf(inv_shape);
        let s = 1.0 - rng.random::<f64>(); // (0, 1]
        *w = -s.ln() / rate;
    }

    let n = graph.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent: Vec<Option<u32>> = vec![None; n];
    let mut entering_wait = vec![0.0f64; n];
    let mut settled = vec![false; n];
    let mut order: Vec<u32> = Vec::new();
    dist[source as usize] = 0.0;

    // (dist, node) min-heap; ties break toward the smaller node id.
    let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<(OrderedF64, u32)>> =
        std::collections::BinaryHeap::new();
    heap.push(std::cmp::Reverse((OrderedF64(0.0), source)));
    while let Some(std::cmp::Reverse((OrderedF64(d), node))) = heap.pop() {
        if settled[node as usize] {
            continue;
        }
        settled[node as usize] = true;
        order.push(node);
        let base = graph.offsets[node as usize];
        for (k, &next) in graph.neighbors(node).iter().enumerate() {
            if settled[next as usize] {
                continue;
            }
            let candidate = d + weights[base + k];
            if candidate < dist[next as usize] {
                dist[next as usize] = candidate;
                parent[next as usize] = Some(node);
                entering_wait[next as usize] = weights[base + k];
                heap.push(std::cmp::Reverse((OrderedF64(candidate), next)));
            }
        }
    }

    let cascade_id = cascade_id.into();
    let events: Vec<CascadeEvent<T>> = order
        .iter()
        .enumerate()
        .map(|(k, &node)| {
            CascadeEvent::new(
                format!("{cascade_id}:{k}"),
                node.to_string(),
                from_f64(dist[node as usize]),
                graph.out_degree(node) as u64,
            )
        })
        .collect();

    // Subtree sizes: fold children into parents in reverse arrival order.
    let mut position = vec![usize::MAX; n];
    for (k, &node) in order.iter().enumerate() {
        position[node as usize] = k;
    }
    let mut reach = vec![0u64; order.len()];
    let mut parent_position: Vec<Option<usize>> = vec![None; order.len()];
    let mut edge_wait = vec![T::zero(); order.len()];
    for k in (1..order.len()).rev() {
        let node = order[k];
        let up = parent[node as usize].expect("non-source settled node has a parent");
        parent_position[k] = Some(position[up as usize]);
        edge_wait[k] = from_f64(entering_wait[node as usize]);
        reach[position[up as usize]] += reach[k] + 1;
    }

    let cascade = Cascade::new(cascade_id, events).expect("sampled events are valid");
    let isolated_source = order.len() == 1;
    SampledDiffusion {
        cascade,
        nodes: order,
        parent_position,
        edge_wait,
        reach,
        source,
        isolated_source,
    }
}

/// Samples `count` diffusions from one source in parallel, one independent
/// random stream per cascade index. Cascade ids are `{prefix}c{index:06}`.
pub fn sample_cascades<T: Real>(
    graph: &SocialGraph,
    source: u32,
    params: &DiffusionParams,
    seed: u64,
    count: usize,
    prefix: &str,
) -> Vec<SampledDiffusion<T>> {
    (0..count)
        .into_par_iter()
        .map(|index| {
            sample_cascade(
                graph,
                source,
                params,
                seed,
                index as u64 + 1,
                format!("{prefix}c{index:06}"),
            )
        })
        .collect()
}

/// Per-node mean descendant count over the diffusions each node appears in.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth<T> {
    per_node: std::collections::BTreeMap<u32, T>,
}

impl<T: Real> GroundTruth<T> {
    pub fn mean_reach(&self, node: u32) -> Option<T> {
        self.per_node.get(&node).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, T)> + '_ {
        self.per_node.iter().map(|(&node, &reach)| (node, reach))
    }

    pub fn len(&self) -> usize {
        self.per_node.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_node.is_empty()
    }
}

pub fn ground_truth<T: Real>(diffusions: &[SampledDiffusion<T>]) -> GroundTruth<T> {
    assert!(!diffusions.is_empty(), "ground truth needs >= 1 diffusion");
    let mut sums: std::collections::BTreeMap<u32, (u64, u64)> = std::collections::BTreeMap::new();
    for diffusion in diffusions {
        for (&node, &reach) in diffusion.nodes.iter().zip(&diffusion.reach) {
            let entry = sums.entry(node).or_insert((0, 0));
            entry.0 += reach;
            entry.1 += 1;
        }
    }
    GroundTruth {
        per_node: sums
            .into_iter()
            .map(|(node, (sum, count))| (node, from_u64::<T>(sum) / from_u64(count)))
            .collect(),
    }
}

/// Spearman rank correlation between estimated influence and ground truth
/// over their common nodes.
pub fn evaluate_estimator<T: Real>(
    estimates: &std::collections::BTreeMap<u32, T>,
    truth: &GroundTruth<T>,
) -> Result<T, SynthError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (node, reach) in truth.iter() {
        if let Some(&estimate) = estimates.get(&node) {
            xs.push(estimate);
            ys.push(reach);
        }
    }
    if xs.len() < 3 {
        return Err(SynthError::TooFewPoints { found: xs.len() });
    }
    spearman(&xs, &ys).ok_or(SynthError::ZeroVariance)
}

/// Random follow graph: every user follows `followees_per_user` distinct
/// other users, drawn uniformly. User ids are `u0000`-style, zero padded.
pub fn generate_follow_graph(users: usize, followees_per_user: usize, seed: u64) -> FollowGraph {
    assert!(users >= 2 && followees_per_user < users);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(String, String)> = Vec::with_capacity(users * followees_per_user);
    for follower in 0..users {
        let mut chosen: HashSet<usize> = HashSet::with_capacity(followees_per_user);
        while chosen.len() < followees_per_user {
            let followee = rng.random_range(0..users);
            if followee != follower {
                chosen.insert(followee);
            }
        }
        let mut chosen: Vec<usize> = chosen.into_iter().collect();
        chosen.sort_unstable();
        for followee in chosen {
            edges.push((user_name(follower), user_name(followee)));
        }
    }
    FollowGraph::from_edges(edges).expect("generated edges have no self-loops")
}

fn user_name(index: usize) -> String {
    format!("u{index:04}")
}

/// Configuration of the follow-constrained corpus with a planted decay rate.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedCorpusConfig {
    pub cascades: usize,
    pub events_per_cascade: usize,
    /// The decay rate the attachment kernel is planted with, in 1/seconds.
    pub decay: f64,
    /// Mean inter-arrival gap in seconds (exponentially distributed).
    pub mean_gap: f64,
    pub smoothing: f64,
    pub seed: u64,
}

impl Default for PlantedCorpusConfig {
    fn default() -> Self {
        Self {
            cascades: 200,
            events_per_cascade: 30,
            decay: 1e-3,
            mean_gap: 500.0,
            smoothing: 1.0,
            seed: 7,
        }
    }
}

/// Generates cascades that diffuse strictly along follow edges: each new
/// event picks a parent among earlier events with probability proportional to
/// `(followers + smoothing) * exp(-decay * dt)`, then the retweeter is a
/// uniformly drawn follower of that parent. Follower counts in the emitted
/// events are the follow-graph in-degrees, so the attachment kernel that
/// generated the data is exactly recoverable from it.
pub fn sample_planted_corpus<T: Real>(
    follows: &FollowGraph,
    users: usize,
    cfg: &PlantedCorpusConfig,
) -> Vec<Cascade<T>> {
    let follower_counts: Vec<usize> = (0..users)
        .map(|i| follows.follower_count(&user_name(i)))
        .collect();
    let followed_users: Vec<usize> = (0..users).filter(|&i| follower_counts[i] > 0).collect();
    assert!(
        !followed_users.is_empty(),
        "planted corpus needs at least one followed user"
    );

    (0..cfg.cascades)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(index as u64 + 1);
            let root = followed_users[rng.random_range(0..followed_users.len())];

            let mut authors: Vec<usize> = vec![root];
            let mut times: Vec<f64> = vec![0.0];
            let mut weights: Vec<f64> = Vec::new();
            for _ in 1..cfg.events_per_cascade {
                let gap = -cfg.mean_gap * (1.0 - rng.random::<f64>()).ln();
                let t = times.last().unwrap() + gap;

                weights.clear();
                weights.extend(times.iter().zip(&authors).map(|(&ti, &author)| {
                    if follower_counts[author] == 0 {
                        0.0
                    } else {
                        (follower_counts[author] as f64 + cfg.smoothing)
                            * (-cfg.decay * (t - ti)).exp()
                    }
                }));
                let total: f64 = weights.iter().sum();
                if total <= 0.0 {
                    break;
                }
                let mut draw = rng.random::<f64>() * total;
                let mut parent = weights.len() - 1;
                for (i, &w) in weights.iter().enumerate() {
                    if draw < w {
                        parent = i;
                        break;
                    }
                    draw -= w;
                }
                let candidates = follows.followers_of(&user_name(authors[parent]));
                let retweeter = &candidates[rng.random_range(0..candidates.len())];
                let retweeter_index: usize = retweeter[1..].parse().expect("uNNNN user name");
                authors.push(retweeter_index);
                times.push(t);
            }

            let events: Vec<CascadeEvent<T>> = authors
                .iter()
                .zip(&times)
                .enumerate()
                .map(|(k, (&author, &t))| {
                    CascadeEvent::new(
                        format!("c{index:04}:{k}"),
                        user_name(author),
                        from_f64(t),
                        follower_counts[author] as u64,
                    )
                })
                .collect();
            Cascade::new(format!("c{index:04}"), events).expect("planted events are valid")
        })
        .collect()
}

/// Total-order wrapper so finite distances can live in a heap.
#[derive(PartialEq)]
struct OrderedF64(f64);

impl Eq for OrderedF64 {}

impl PartialOrd for OrderedF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrderedF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}
