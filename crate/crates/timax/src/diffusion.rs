//! Influence spread oracles for the independent cascade process: Monte Carlo
//! estimation by live-edge sampling, and exact expectation by enumeration on
//! small graphs.
//!
//! The coupling view drives both: every edge carries an independent uniform
//! draw `x(e)`, and the edge is live under probability function `p` when
//! `x(e) < p(e)`. Spread is the expected number of nodes reachable from the
//! seed set through live edges. Monte Carlo runs realize the draws lazily
//! during traversal; the draw for `(run, edge)` is a pure hash of
//! `(master seed, run index, edge id)`, so runs are reproducible, runs can be
//! partitioned across workers without changing the result, and two seed sets
//! (or two probability functions) evaluated under the same master seed share
//! their coins. That shared-coin property is what makes per-run coupling and
//! common-random-number marginal gains work.

use std::cell::Cell;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{EdgeProbs, NodeId, TopicGraph};

/// Edges with probability strictly inside (0,1) that exact enumeration will
/// accept; 2^25 assignments complete in seconds.
pub const MAX_FREE_EDGES: usize = 25;

thread_local! {
    static ORACLE_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// Number of spread-oracle invocations (Monte Carlo or exact) made by the
/// calling thread. Counted at the synchronous call site, so wrapping a code
/// region with two reads measures exactly that region's oracle usage; online
/// query paths must leave it untouched.
pub fn oracle_calls() -> u64 {
    ORACLE_CALLS.with(|c| c.get())
}

fn note_oracle_call() {
    ORACLE_CALLS.with(|c| c.set(c.get() + 1));
}

/// How spread and marginal influence are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleConfig {
    /// Exact expectation by live-edge enumeration; small graphs only.
    Exact,
    /// Monte Carlo estimation with `runs` live-edge draws derived from
    /// `seed`.
    MonteCarlo { runs: u32, seed: u64 },
}

impl OracleConfig {
    pub fn is_exact(&self) -> bool {
        matches!(self, OracleConfig::Exact)
    }

    /// Same configuration with the run-stream seed replaced; exact configs
    /// are returned unchanged.
    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            OracleConfig::Exact => OracleConfig::Exact,
            OracleConfig::MonteCarlo { runs, .. } => OracleConfig::MonteCarlo { runs, seed },
        }
    }
}

impl std::fmt::Display for OracleConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OracleConfig::Exact => write!(f, "exact"),
            OracleConfig::MonteCarlo { runs, seed } => write!(f, "mc(runs={runs},seed={seed})"),
        }
    }
}

impl std::str::FromStr for OracleConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "exact" {
            return Ok(OracleConfig::Exact);
        }
        let body = s
            .strip_prefix("mc(")
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(|| Error::InvalidInput(format!("unknown oracle {s:?}")))?;
        let mut runs = None;
        let mut seed = None;
        for part in body.split(',') {
            match part.split_once('=') {
                Some(("runs", v)) => {
                    runs = Some(v.parse().map_err(|_| {
                        Error::InvalidInput(format!("bad runs in oracle {s:?}"))
                    })?)
                }
                Some(("seed", v)) => {
                    seed = Some(v.parse().map_err(|_| {
                        Error::InvalidInput(format!("bad seed in oracle {s:?}"))
                    })?)
                }
                _ => return Err(Error::InvalidInput(format!("unknown oracle {s:?}"))),
            }
        }
        match (runs, seed) {
            (Some(runs), Some(seed)) => Ok(OracleConfig::MonteCarlo { runs, seed }),
            _ => Err(Error::InvalidInput(format!("unknown oracle {s:?}"))),
        }
    }
}

/// A Monte Carlo spread estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpreadEstimate {
    /// Mean activated-node count over the runs.
    pub mean: f64,
    /// Sample standard deviation of the per-run counts divided by
    /// `sqrt(runs)`.
    pub std_error: f64,
    pub runs: u32,
}

/// The live edges of one coupling draw.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiveEdgeSample {
    /// Edge ids selected live, ascending.
    pub live_edges: Vec<u32>,
}

// SplitMix64 finalizer: a cheap, well-mixed 64-bit permutation.
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const RUN_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;
const EDGE_STREAM: u64 = 0xd1b5_4a32_d192_ed03;

/// Derives an independent substream seed, e.g. one per index entry.
pub(crate) fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(master ^ mix64(index.wrapping_add(1).wrapping_mul(RUN_STREAM)))
}

#[inline]
fn run_salt(master: u64, run: u32) -> u64 {
    mix64(master ^ (run as u64 + 1).wrapping_mul(RUN_STREAM))
}

/// Uniform draw in [0,1) keyed by (run salt, edge id).
#[inline]
fn edge_coin(salt: u64, edge: u32) -> f64 {
    let bits = mix64(salt ^ (edge as u64 + 1).wrapping_mul(EDGE_STREAM));
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Reusable traversal scratch; epoch-stamped visit marks avoid clearing.
struct Traversal {
    stamp: Vec<u32>,
    epoch: u32,
    stack: Vec<NodeId>,
}

impl Traversal {
    fn new(nodes: u32) -> Self {
        Traversal {
            stamp: vec![0; nodes as usize],
            epoch: 0,
            stack: Vec::new(),
        }
    }

    /// Count of nodes reachable from `seeds` through edges live under the
    /// coins of `salt`. Each edge's coin is fixed by (salt, edge id), so the
    /// visit order does not affect the outcome.
    fn live_reachable(
        &mut self,
        graph: &TopicGraph,
        probs: &EdgeProbs,
        seeds: &[NodeId],
        salt: u64,
    ) -> u32 {
        self.epoch += 1;
        let epoch = self.epoch;
        self.stack.clear();
        let mut count = 0u32;
        for &s in seeds {
            if self.stamp[s as usize] != epoch {
                self.stamp[s as usize] = epoch;
                count += 1;
                self.stack.push(s);
            }
        }
        while let Some(u) = self.stack.pop() {
            for e in graph.out_range(u) {
                let v = graph.edge_target(e);
                if self.stamp[v as usize] == epoch {
                    continue;
                }
                if edge_coin(salt, e as u32) < probs.get(e) {
                    self.stamp[v as usize] = epoch;
                    count += 1;
                    self.stack.push(v);
                }
            }
        }
        count
    }
}

fn check_inputs(graph: &TopicGraph, probs: &EdgeProbs, seeds: &[NodeId]) -> Result<()> {
    if probs.len() != graph.edge_count() {
        return Err(Error::InvalidInput(format!(
            "probability function covers {} edges, graph has {}",
            probs.len(),
            graph.edge_count()
        )));
    }
    if let Some(&bad) = seeds.iter().find(|&&s| s >= graph.node_count()) {
        return Err(Error::InvalidInput(format!(
            "seed node {bad} outside [0,{})",
            graph.node_count()
        )));
    }
    Ok(())
}

fn dedup_seeds(seeds: &[NodeId]) -> Vec<NodeId> {
    let mut s = seeds.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

/// Monte Carlo estimate of the influence spread of `seeds`.
///
/// Deterministic given `master_seed`, independent of how runs are
/// partitioned across workers: per-run counts are integers and are
/// aggregated by exact integer sums.
pub fn simulate_spread(
    graph: &TopicGraph,
    probs: &EdgeProbs,
    seeds: &[NodeId],
    runs: u32,
    master_seed: u64,
) -> Result<SpreadEstimate> {
    if runs == 0 {
        return Err(Error::InvalidInput("runs must be at least 1".into()));
    }
    check_inputs(graph, probs, seeds)?;
    note_oracle_call();
    let seeds = dedup_seeds(seeds);
    if seeds.is_empty() {
        return Ok(SpreadEstimate {
            mean: 0.0,
            std_error: 0.0,
            runs,
        });
    }

    let (sum, sum_sq) = (0..runs)
        .into_par_iter()
        .map_init(
            || Traversal::new(graph.node_count()),
            |trav, run| {
                let c = trav.live_reachable(graph, probs, &seeds, run_salt(master_seed, run))
                    as u64;
                (c, (c * c) as u128)
            },
        )
        .reduce(|| (0u64, 0u128), |a, b| (a.0 + b.0, a.1 + b.1));

    let n = runs as f64;
    let mean = sum as f64 / n;
    let std_error = if runs > 1 {
        let var = (sum_sq as f64 - (sum as f64) * (sum as f64) / n) / (n - 1.0);
        (var.max(0.0) / n).sqrt()
    } else {
        0.0
    };
    Ok(SpreadEstimate {
        mean,
        std_error,
        runs,
    })
}

/// Per-run reachable counts under the given master seed, in run order.
///
/// Exposes the coupling directly: for `p ≤ p'` edgewise and the same master
/// seed, each run's count under `p` is at most its count under `p'`.
pub fn per_run_counts(
    graph: &TopicGraph,
    probs: &EdgeProbs,
    seeds: &[NodeId],
    runs: u32,
    master_seed: u64,
) -> Result<Vec<u32>> {
    if runs == 0 {
        return Err(Error::InvalidInput("runs must be at least 1".into()));
    }
    check_inputs(graph, probs, seeds)?;
    note_oracle_call();
    let seeds = dedup_seeds(seeds);
    if seeds.is_empty() {
        return Ok(vec![0; runs as usize]);
    }
    Ok((0..runs)
        .into_par_iter()
        .map_init(
            || Traversal::new(graph.node_count()),
            |trav, run| trav.live_reachable(graph, probs, &seeds, run_salt(master_seed, run)),
        )
        .collect())
}

/// Materializes the live-edge set of one coupling draw.
pub fn draw_live_edges(
    graph: &TopicGraph,
    probs: &EdgeProbs,
    master_seed: u64,
    run: u32,
) -> Result<LiveEdgeSample> {
    if probs.len() != graph.edge_count() {
        return Err(Error::InvalidInput(format!(
            "probability function covers {} edges, graph has {}",
            probs.len(),
            graph.edge_count()
        )));
    }
    let salt = run_salt(master_seed, run);
    let live_edges = (0..graph.edge_count() as u32)
        .filter(|&e| edge_coin(salt, e) < probs.get(e as usize))
        .collect();
    Ok(LiveEdgeSample { live_edges })
}

/// Exact influence spread: the expectation of reachable-set size over all
/// live/blocked assignments of the free edges.
///
/// Edges with probability 0 or 1 are fixed rather than enumerated; at most
/// [`MAX_FREE_EDGES`] free edges are accepted.
pub fn exact_spread(graph: &TopicGraph, probs: &EdgeProbs, seeds: &[NodeId]) -> Result<f64> {
    check_inputs(graph, probs, seeds)?;
    note_oracle_call();
    let seeds = dedup_seeds(seeds);
    if seeds.is_empty() {
        return Ok(0.0);
    }

    let mut role = vec![EDGE_BLOCKED; graph.edge_count()];
    let mut free_probs = Vec::new();
    for e in 0..graph.edge_count() {
        let p = probs.get(e);
        if p >= 1.0 {
            role[e] = EDGE_LIVE;
        } else if p > 0.0 {
            role[e] = free_probs.len() as i32;
            free_probs.push(p);
        }
    }
    let free = free_probs.len();
    if free > MAX_FREE_EDGES {
        return Err(Error::EnumerationBound {
            free,
            limit: MAX_FREE_EDGES,
        });
    }

    // Assignment probabilities factor over the free edges; split the mask so
    // each assignment's weight is two table lookups instead of a product.
    let lo_bits = free / 2;
    let lo_table = half_products(&free_probs[..lo_bits]);
    let hi_table = half_products(&free_probs[lo_bits..]);

    let mut trav = Traversal::new(graph.node_count());
    let mut total = 0.0f64;
    for mask in 0u64..(1u64 << free) {
        let weight =
            lo_table[(mask & ((1 << lo_bits) - 1)) as usize] * hi_table[(mask >> lo_bits) as usize];
        let count = reach_under_mask(&mut trav, graph, &role, mask, &seeds);
        total += weight * count as f64;
    }
    Ok(total)
}

/// Edge roles for exact enumeration: blocked, always live, or an index into
/// the free-edge list.
const EDGE_BLOCKED: i32 = -1;
const EDGE_LIVE: i32 = -2;

/// Products Π p or (1-p) over one half of the free edges, indexed by the
/// live-bit pattern of that half.
fn half_products(probs: &[f64]) -> Vec<f64> {
    let mut table = vec![1.0f64; 1 << probs.len()];
    for mask in 0..table.len() {
        let mut w = 1.0;
        for (bit, &p) in probs.iter().enumerate() {
            w *= if mask >> bit & 1 == 1 { p } else { 1.0 - p };
        }
        table[mask] = w;
    }
    table
}

fn reach_under_mask(
    trav: &mut Traversal,
    graph: &TopicGraph,
    role: &[i32],
    mask: u64,
    seeds: &[NodeId],
) -> u32 {
    trav.epoch += 1;
    let epoch = trav.epoch;
    trav.stack.clear();
    let mut count = 0u32;
    for &s in seeds {
        if trav.stamp[s as usize] != epoch {
            trav.stamp[s as usize] = epoch;
            count += 1;
            trav.stack.push(s);
        }
    }
    while let Some(u) = trav.stack.pop() {
        for e in graph.out_range(u) {
            let v = graph.edge_target(e);
            if trav.stamp[v as usize] == epoch {
                continue;
            }
            let live = match role[e] {
                EDGE_LIVE => true,
                EDGE_BLOCKED => false,
                idx => mask >> idx & 1 == 1,
            };
            if live {
                trav.stamp[v as usize] = epoch;
                count += 1;
                trav.stack.push(v);
            }
        }
    }
    count
}

/// Marginal influence of `v` given the base seed set: σ(S ∪ {v}) − σ(S).
///
/// Monte Carlo mode evaluates both sets under the same master seed; shared
/// coins cancel most of the run-to-run variance.
pub fn marginal_influence(
    graph: &TopicGraph,
    probs: &EdgeProbs,
    base: &[NodeId],
    v: NodeId,
    oracle: OracleConfig,
) -> Result<f64> {
    if v >= graph.node_count() {
        return Err(Error::InvalidInput(format!(
            "node {v} outside [0,{})",
            graph.node_count()
        )));
    }
    if base.contains(&v) {
        return Ok(0.0);
    }
    let mut extended = base.to_vec();
    extended.push(v);
    match oracle {
        OracleConfig::Exact => {
            let with = exact_spread(graph, probs, &extended)?;
            let without = exact_spread(graph, probs, base)?;
            Ok((with - without).max(0.0))
        }
        OracleConfig::MonteCarlo { runs, seed } => {
            let with = simulate_spread(graph, probs, &extended, runs, seed)?;
            let without = simulate_spread(graph, probs, base, runs, seed)?;
            Ok(with.mean - without.mean)
        }
    }
}

/// Spread under the configured oracle: the Monte Carlo mean or the exact
/// expectation.
pub fn spread(
    graph: &TopicGraph,
    probs: &EdgeProbs,
    seeds: &[NodeId],
    oracle: OracleConfig,
) -> Result<f64> {
    match oracle {
        OracleConfig::Exact => exact_spread(graph, probs, seeds),
        OracleConfig::MonteCarlo { runs, seed } => {
            Ok(simulate_spread(graph, probs, seeds, runs, seed)?.mean)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::TopicMixture;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn single_topic(n: u32, edges: Vec<(NodeId, NodeId, f64)>) -> (TopicGraph, EdgeProbs) {
        let g = TopicGraph::from_entries(n, 1, edges.into_iter().map(|(u, v, p)| (u, v, 0, p)))
            .unwrap();
        let p = g
            .mix_probabilities(&TopicMixture::one_hot(1, 0).unwrap())
            .unwrap();
        (g, p)
    }

    fn random_instance(
        rng: &mut ChaCha8Rng,
        max_nodes: u32,
        max_edges: usize,
    ) -> (TopicGraph, EdgeProbs) {
        let n = rng.gen_range(2..=max_nodes);
        let mut seen = std::collections::HashSet::new();
        let mut edges = Vec::new();
        for _ in 0..rng.gen_range(1..=max_edges) {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v && seen.insert((u, v)) {
                edges.push((u, v, rng.gen_range(0.05..0.95)));
            }
        }
        single_topic(n, edges)
    }

    #[test]
    fn empty_seed_set_spreads_nothing() {
        let (g, p) = single_topic(3, vec![(0, 1, 0.5)]);
        let est = simulate_spread(&g, &p, &[], 100, 7).unwrap();
        assert_eq!(est.mean, 0.0);
        assert_eq!(est.std_error, 0.0);
        assert_eq!(exact_spread(&g, &p, &[]).unwrap(), 0.0);
    }

    #[test]
    fn isolated_seed_activates_only_itself() {
        let (g, p) = single_topic(4, vec![(0, 1, 0.5)]);
        let est = simulate_spread(&g, &p, &[3], 500, 11).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn two_node_edge_matches_analytic_mean() {
        let (g, p) = single_topic(2, vec![(0, 1, 0.5)]);
        let est = simulate_spread(&g, &p, &[0], 10_000, 42).unwrap();
        assert!(
            (est.mean - 1.5).abs() <= 4.0 * est.std_error,
            "mean {} se {}",
            est.mean,
            est.std_error
        );
    }

    #[test]
    fn exact_spread_on_two_edge_path() {
        // 1 + 0.5 + 0.25 over the four live/blocked assignments.
        let (g, p) = single_topic(3, vec![(0, 1, 0.5), (1, 2, 0.5)]);
        let spread = exact_spread(&g, &p, &[0]).unwrap();
        assert!((spread - 1.75).abs() < 1e-12);
    }

    #[test]
    fn exact_spread_all_certain_edges_is_reachability() {
        let (g, p) = single_topic(5, vec![(0, 1, 1.0), (1, 2, 1.0), (3, 4, 1.0)]);
        assert_eq!(exact_spread(&g, &p, &[0]).unwrap(), 3.0);
        assert_eq!(exact_spread(&g, &p, &[3]).unwrap(), 2.0);
    }

    #[test]
    fn exact_spread_rejects_too_many_free_edges() {
        let edges: Vec<_> = (0..26).map(|i| (i, i + 1, 0.5)).collect();
        let (g, p) = single_topic(27, edges);
        assert!(matches!(
            exact_spread(&g, &p, &[0]),
            Err(Error::EnumerationBound { free: 26, .. })
        ));
    }

    #[test]
    fn marginal_influence_examples() {
        let (g, p) = single_topic(3, vec![(0, 1, 0.5)]);
        // v already in S.
        assert_eq!(
            marginal_influence(&g, &p, &[0], 0, OracleConfig::Exact).unwrap(),
            0.0
        );
        // Isolated node activates only itself.
        assert_eq!(
            marginal_influence(&g, &p, &[0], 2, OracleConfig::Exact).unwrap(),
            1.0
        );
        // MI(u | ∅) on the 0.5 edge.
        let mi = marginal_influence(&g, &p, &[], 0, OracleConfig::Exact).unwrap();
        assert!((mi - 1.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range_seed() {
        let (g, p) = single_topic(2, vec![(0, 1, 0.5)]);
        assert!(simulate_spread(&g, &p, &[2], 10, 0).is_err());
        assert!(exact_spread(&g, &p, &[9]).is_err());
    }

    #[test]
    fn deterministic_given_master_seed() {
        let (g, p) = single_topic(4, vec![(0, 1, 0.3), (1, 2, 0.7), (0, 3, 0.5)]);
        let a = simulate_spread(&g, &p, &[0], 2000, 99).unwrap();
        let b = simulate_spread(&g, &p, &[0], 2000, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lazy_traversal_matches_materialized_live_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..20 {
            let (g, p) = random_instance(&mut rng, 8, 14);
            let seeds = vec![0];
            let counts = per_run_counts(&g, &p, &seeds, 16, trial).unwrap();
            for (run, &count) in counts.iter().enumerate() {
                let sample = draw_live_edges(&g, &p, trial, run as u32).unwrap();
                let live: std::collections::HashSet<u32> =
                    sample.live_edges.iter().copied().collect();
                // BFS over the materialized sample.
                let mut seen = vec![false; g.node_count() as usize];
                let mut stack = seeds.clone();
                seen[0] = true;
                let mut reach = 1u32;
                while let Some(u) = stack.pop() {
                    for e in g.out_range(u) {
                        let v = g.edge_target(e);
                        if !seen[v as usize] && live.contains(&(e as u32)) {
                            seen[v as usize] = true;
                            reach += 1;
                            stack.push(v);
                        }
                    }
                }
                assert_eq!(count, reach);
            }
        }
    }

    #[test]
    fn coupling_counts_increase_with_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..25 {
            let (g, p) = random_instance(&mut rng, 9, 16);
            let boosted: Vec<f64> = p
                .values()
                .iter()
                .map(|&x| (x + rng.gen_range(0.0..0.3)).min(1.0))
                .collect();
            let p_hi = EdgeProbs::from_values(&g, boosted).unwrap();
            let lo = per_run_counts(&g, &p, &[0, 1], 64, trial).unwrap();
            let hi = per_run_counts(&g, &p_hi, &[0, 1], 64, trial).unwrap();
            for (a, b) in lo.iter().zip(&hi) {
                assert!(a <= b, "coupled run counts must be ordered: {a} > {b}");
            }
        }
    }

    #[test]
    fn live_edge_frequencies_match_probabilities() {
        let (g, p) = single_topic(3, vec![(0, 1, 0.3), (1, 2, 0.8)]);
        let draws = 20_000u32;
        let mut hits = [0u32; 2];
        for run in 0..draws {
            for e in draw_live_edges(&g, &p, 123, run).unwrap().live_edges {
                hits[e as usize] += 1;
            }
        }
        let f0 = hits[0] as f64 / draws as f64;
        let f1 = hits[1] as f64 / draws as f64;
        // 4-sigma bands for Bernoulli frequencies at 20k draws.
        assert!((f0 - 0.3).abs() < 4.0 * (0.3f64 * 0.7 / draws as f64).sqrt());
        assert!((f1 - 0.8).abs() < 4.0 * (0.8f64 * 0.2 / draws as f64).sqrt());
    }

    #[test]
    fn monte_carlo_agrees_with_exact_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..10 {
            let (g, p) = random_instance(&mut rng, 7, 10);
            let seeds: Vec<NodeId> = (0..g.node_count())
                .filter(|_| rng.gen_bool(0.4))
                .collect();
            if seeds.is_empty() {
                continue;
            }
            let exact = exact_spread(&g, &p, &seeds).unwrap();
            let est = simulate_spread(&g, &p, &seeds, 10_000, 1000 + trial).unwrap();
            let slack = 4.0 * est.std_error + 1e-9;
            assert!(
                (est.mean - exact).abs() <= slack,
                "mc {} vs exact {} (se {})",
                est.mean,
                exact,
                est.std_error
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        // Monotone in p and monotone + submodular in S, checked exactly.
        #[test]
        fn exact_spread_monotone_and_submodular(graph_seed in 0u64..5000) {
            let mut rng = ChaCha8Rng::seed_from_u64(graph_seed);
            let (g, p) = random_instance(&mut rng, 7, 9);
            let p_hi = EdgeProbs::from_values(
                &g,
                p.values().iter().map(|&x| (x * 1.3).min(1.0)).collect(),
            )
            .unwrap();

            let n = g.node_count();
            let small: Vec<NodeId> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
            let mut large = small.clone();
            for v in 0..n {
                if !large.contains(&v) && rng.gen_bool(0.3) {
                    large.push(v);
                }
            }

            let s_small = exact_spread(&g, &p, &small).unwrap();
            let s_large = exact_spread(&g, &p, &large).unwrap();
            prop_assert!(s_small <= s_large + 1e-9);
            prop_assert!(s_small <= exact_spread(&g, &p_hi, &small).unwrap() + 1e-9);

            if let Some(v) = (0..n).find(|v| !large.contains(v)) {
                let gain_small = marginal_influence(&g, &p, &small, v, OracleConfig::Exact).unwrap();
                let gain_large = marginal_influence(&g, &p, &large, v, OracleConfig::Exact).unwrap();
                prop_assert!(gain_small >= gain_large - 1e-9);
            }
        }
    }
}
