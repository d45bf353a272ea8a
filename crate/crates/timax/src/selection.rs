//! Seed-set selection: greedy with lazy evaluation, plus the comparison
//! baselines (degree, weighted degree, PageRank, random, topic-oblivious
//! greedy).

use std::cell::Cell;
use std::cmp::Ordering as CmpOrdering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::diffusion::{self, OracleConfig};
use crate::error::{Error, Result};
use crate::graph::{EdgeProbs, NodeId, TopicGraph, TopicMixture};

thread_local! {
    static GREEDY_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// Number of greedy selections started by the calling thread. Online query
/// paths must leave this untouched.
pub fn greedy_calls() -> u64 {
    GREEDY_CALLS.with(|c| c.get())
}

/// One seed in greedy order with its marginal influence at selection time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeedRecord {
    pub node: NodeId,
    /// 1-based greedy rank.
    pub rank: u32,
    /// Marginal influence of this node at the moment it was selected.
    pub marginal_influence: f64,
    /// Spread of the first `rank` seeds under the selection oracle.
    pub cumulative_spread: f64,
}

/// The ordered output of one greedy run.
#[derive(Clone, Debug, PartialEq)]
pub struct GreedyResult {
    pub records: Vec<SeedRecord>,
    /// Which probability function the run was computed under.
    pub probability_id: String,
    pub oracle: OracleConfig,
}

impl GreedyResult {
    pub fn seeds(&self) -> Vec<NodeId> {
        self.records.iter().map(|r| r.node).collect()
    }

    /// Spread of the full seed set; zero for an empty result.
    pub fn total_spread(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.cumulative_spread)
    }
}

#[derive(Debug)]
struct CelfEntry {
    gain: f64,
    /// Spread of the current seed set plus this node, from the evaluation
    /// that produced `gain`.
    total: f64,
    node: NodeId,
    /// Round in which `gain` was computed; fresh iff equal to the current
    /// round.
    round: u32,
}

impl PartialEq for CelfEntry {
    fn eq(&self, other: &Self) -> bool {
        self.gain == other.gain && self.node == other.node
    }
}

impl Eq for CelfEntry {}

impl PartialOrd for CelfEntry {
    fn partial_cmp(&self, other: &Self) -> Option<CmpOrdering> {
        Some(self.cmp(other))
    }
}

impl Ord for CelfEntry {
    // Max-heap on gain; ties go to the lowest node id.
    fn cmp(&self, other: &Self) -> CmpOrdering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Greedy seed selection with lazy evaluation.
///
/// Cached marginal gains upper-bound current gains under submodularity, so a
/// node is re-evaluated only when it reaches the top of the queue stale;
/// a fresh node at the top is selected. With the exact oracle and the
/// lowest-id tie-break this reproduces plain greedy exactly. Marginal gains
/// under the Monte Carlo oracle share one coin stream across all candidates
/// and rounds, which keeps the per-round argmax stable at finite run counts.
pub fn greedy_select(
    graph: &TopicGraph,
    probs: &EdgeProbs,
    k: u32,
    oracle: OracleConfig,
    probability_id: impl Into<String>,
) -> Result<GreedyResult> {
    GREEDY_CALLS.with(|c| c.set(c.get() + 1));
    let k = k.min(graph.node_count());
    let mut result = GreedyResult {
        records: Vec::with_capacity(k as usize),
        probability_id: probability_id.into(),
        oracle,
    };
    if k == 0 {
        return Ok(result);
    }

    // Round 1 evaluates every node; σ(∅) = 0 so the gain is the spread.
    let initial: Vec<f64> = (0..graph.node_count())
        .into_par_iter()
        .map(|v| diffusion::spread(graph, probs, &[v], oracle))
        .collect::<Result<_>>()?;
    let mut heap: BinaryHeap<CelfEntry> = initial
        .into_iter()
        .enumerate()
        .map(|(v, total)| CelfEntry {
            gain: total,
            total,
            node: v as NodeId,
            round: 1,
        })
        .collect();

    let mut seeds: Vec<NodeId> = Vec::with_capacity(k as usize);
    let mut current_spread = 0.0f64;
    for round in 1..=k {
        loop {
            let top = heap.pop().expect("candidates remain while |S| < k <= n");
            if top.round == round {
                seeds.push(top.node);
                result.records.push(SeedRecord {
                    node: top.node,
                    rank: round,
                    marginal_influence: top.gain,
                    cumulative_spread: top.total,
                });
                current_spread = top.total;
                break;
            }
            let mut extended = seeds.clone();
            extended.push(top.node);
            let total = diffusion::spread(graph, probs, &extended, oracle)?;
            heap.push(CelfEntry {
                gain: total - current_spread,
                total,
                node: top.node,
                round,
            });
        }
    }
    Ok(result)
}

/// Baseline selection methods.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaselineMethod {
    /// Top-k nodes by out-degree, ignoring probabilities.
    ToDegree,
    /// k nodes uniformly at random without replacement.
    Random,
    /// Top-k by total outgoing mixed probability.
    TaWeightedDegree,
    /// Top-k PageRank scores on the reversed graph with transitions
    /// proportional to incoming mixed probability.
    TaPageRank,
    /// Greedy under the uniform mixture (topic-oblivious).
    ToGreedy,
}

impl std::str::FromStr for BaselineMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "to_degree" | "to-degree" => Ok(BaselineMethod::ToDegree),
            "random" => Ok(BaselineMethod::Random),
            "ta_weighted_degree" | "ta-weighted-degree" => Ok(BaselineMethod::TaWeightedDegree),
            "ta_pagerank" | "ta-pagerank" => Ok(BaselineMethod::TaPageRank),
            "to_greedy" | "to-greedy" => Ok(BaselineMethod::ToGreedy),
            _ => Err(Error::InvalidInput(format!("unknown baseline method {s:?}"))),
        }
    }
}

/// Dispatches to the baseline selectors, validating the per-method inputs.
pub fn select_baseline(
    graph: &TopicGraph,
    method: BaselineMethod,
    mixture: Option<&TopicMixture>,
    k: u32,
    seed: Option<u64>,
    oracle: Option<OracleConfig>,
) -> Result<Vec<NodeId>> {
    let need_mixture = || {
        mixture.ok_or_else(|| {
            Error::InvalidInput("topic-aware baseline requires a mixture".into())
        })
    };
    match method {
        BaselineMethod::ToDegree => Ok(top_degree_seeds(graph, k)),
        BaselineMethod::Random => {
            let seed =
                seed.ok_or_else(|| Error::InvalidInput("random baseline requires a seed".into()))?;
            Ok(random_seeds(graph, k, seed))
        }
        BaselineMethod::TaWeightedDegree => {
            let probs = graph.mix_probabilities(need_mixture()?)?;
            Ok(weighted_degree_seeds(graph, &probs, k))
        }
        BaselineMethod::TaPageRank => {
            let probs = graph.mix_probabilities(need_mixture()?)?;
            Ok(pagerank_seeds(graph, &probs, k))
        }
        BaselineMethod::ToGreedy => {
            let oracle = oracle
                .ok_or_else(|| Error::InvalidInput("to_greedy requires an oracle config".into()))?;
            Ok(to_greedy(graph, k, oracle)?.seeds())
        }
    }
}

/// Indices of the k largest scores, ties broken by lowest node id.
fn top_k_by_score(scores: &[f64], k: u32) -> Vec<NodeId> {
    let mut order: Vec<NodeId> = (0..scores.len() as NodeId).collect();
    order.sort_by(|&a, &b| {
        scores[b as usize]
            .total_cmp(&scores[a as usize])
            .then(a.cmp(&b))
    });
    order.truncate(k as usize);
    order
}

/// Top-k nodes by out-degree.
pub fn top_degree_seeds(graph: &TopicGraph, k: u32) -> Vec<NodeId> {
    let scores: Vec<f64> = (0..graph.node_count())
        .map(|v| graph.out_degree(v) as f64)
        .collect();
    top_k_by_score(&scores, k)
}

/// Top-k nodes by total outgoing probability Σ_v p(u,v).
pub fn weighted_degree_seeds(graph: &TopicGraph, probs: &EdgeProbs, k: u32) -> Vec<NodeId> {
    let scores: Vec<f64> = (0..graph.node_count())
        .map(|u| graph.out_range(u).map(|e| probs.get(e)).sum())
        .collect();
    top_k_by_score(&scores, k)
}

/// k distinct nodes drawn uniformly, deterministic given the seed.
pub fn random_seeds(graph: &TopicGraph, k: u32, seed: u64) -> Vec<NodeId> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let k = k.min(graph.node_count()) as usize;
    rand::seq::index::sample(&mut rng, graph.node_count() as usize, k)
        .into_iter()
        .map(|i| i as NodeId)
        .collect()
}

const PAGERANK_DAMPING: f64 = 0.85;
const PAGERANK_MAX_ITERS: usize = 100;
const PAGERANK_TOLERANCE: f64 = 1e-10;

/// PageRank scores on the reversed graph: rank flows from influenced nodes
/// back to their influencers, with transition weights proportional to the
/// mixed probability of the original edge. Nodes with no incoming
/// probability mass are dangling in the reversed graph and redistribute
/// their rank uniformly.
pub fn pagerank_scores(graph: &TopicGraph, probs: &EdgeProbs) -> Vec<f64> {
    let n = graph.node_count() as usize;
    let mut weight_in = vec![0.0f64; n];
    for e in 0..graph.edge_count() {
        weight_in[graph.edge_target(e) as usize] += probs.get(e);
    }

    let mut rank = vec![1.0 / n as f64; n];
    let mut next = vec![0.0f64; n];
    for _ in 0..PAGERANK_MAX_ITERS {
        let dangling: f64 = (0..n)
            .filter(|&v| weight_in[v] == 0.0)
            .map(|v| rank[v])
            .sum();
        let base = (1.0 - PAGERANK_DAMPING) / n as f64 + PAGERANK_DAMPING * dangling / n as f64;
        next.iter_mut().for_each(|r| *r = base);
        for u in 0..graph.node_count() {
            let mut acc = 0.0;
            for e in graph.out_range(u) {
                let v = graph.edge_target(e) as usize;
                if weight_in[v] > 0.0 {
                    acc += rank[v] * probs.get(e) / weight_in[v];
                }
            }
            next[u as usize] += PAGERANK_DAMPING * acc;
        }
        let l1: f64 = rank
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .sum();
        std::mem::swap(&mut rank, &mut next);
        if l1 < PAGERANK_TOLERANCE {
            break;
        }
    }
    rank
}

/// Top-k nodes by reversed-graph PageRank score.
pub fn pagerank_seeds(graph: &TopicGraph, probs: &EdgeProbs, k: u32) -> Vec<NodeId> {
    top_k_by_score(&pagerank_scores(graph, probs), k)
}

/// Topic-oblivious greedy: greedy selection under the uniform mixture.
pub fn to_greedy(graph: &TopicGraph, k: u32, oracle: OracleConfig) -> Result<GreedyResult> {
    let mixture = TopicMixture::uniform(graph.topic_count() as usize)?;
    let probs = graph.mix_probabilities(&mixture)?;
    greedy_select(graph, &probs, k, oracle, "uniform-mixture")
}
