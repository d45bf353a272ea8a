//! Dataset diagnostics and quality bounds: cross-topic overlap coefficients,
//! seed-source overlap, probability smoothing, optimum upper bounds, topic
//! mixture samplers, and per-topic probability statistics.

use std::collections::HashSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::Dirichlet;

use crate::diffusion::{self, OracleConfig};
use crate::error::{Error, Result};
use crate::graph::{normalize_mixture, EdgeProbs, NodeId, TopicGraph, TopicMixture};
use crate::preprocess::LandmarkIndex;
use crate::selection;

/// Min/mean/max over the defined off-diagonal coefficient pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlapSummary {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

/// Edge and node overlap coefficients at one threshold.
///
/// An entry is `None` on the diagonal and whenever either topic's qualifying
/// set is empty (0/0 is not a meaningful coefficient).
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapReport {
    pub theta: f64,
    pub edge: Vec<Vec<Option<f64>>>,
    pub node: Vec<Vec<Option<f64>>>,
    pub edge_summary: Option<OverlapSummary>,
    pub node_summary: Option<OverlapSummary>,
}

impl OverlapReport {
    /// True when every off-diagonal node coefficient is zero or undefined,
    /// i.e. topics live on disjoint node sets.
    pub fn fully_separable(&self) -> bool {
        self.node
            .iter()
            .enumerate()
            .all(|(i, row)| {
                row.iter()
                    .enumerate()
                    .all(|(j, v)| i == j || v.unwrap_or(0.0) == 0.0)
            })
    }
}

/// Edges with probability above `theta` for one topic, ascending edge ids.
pub fn qualifying_edges(graph: &TopicGraph, topic: u32, theta: f64) -> Vec<u32> {
    (0..graph.edge_count() as u32)
        .filter(|&e| graph.topic_prob(e as usize, topic) > theta)
        .collect()
}

/// Nodes whose total incident probability (out plus in) exceeds `theta` for
/// one topic, ascending node ids.
pub fn qualifying_nodes(graph: &TopicGraph, topic: u32, theta: f64) -> Vec<NodeId> {
    let mut incident = vec![0.0f64; graph.node_count() as usize];
    for e in 0..graph.edge_count() {
        let p = graph.topic_prob(e, topic);
        if p > 0.0 {
            incident[graph.edge_source(e) as usize] += p;
            incident[graph.edge_target(e) as usize] += p;
        }
    }
    (0..graph.node_count())
        .filter(|&v| incident[v as usize] > theta)
        .collect()
}

fn intersection_size(a: &[u32], b: &[u32]) -> usize {
    let mut count = 0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

fn overlap_matrix(sets: &[Vec<u32>]) -> (Vec<Vec<Option<f64>>>, Option<OverlapSummary>) {
    let d = sets.len();
    let mut matrix = vec![vec![None; d]; d];
    let mut defined = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            let denom = sets[i].len().min(sets[j].len());
            if denom == 0 {
                continue;
            }
            let value = intersection_size(&sets[i], &sets[j]) as f64 / denom as f64;
            matrix[i][j] = Some(value);
            matrix[j][i] = Some(value);
            defined.push(value);
        }
    }
    let summary = if defined.is_empty() {
        None
    } else {
        Some(OverlapSummary {
            min: defined.iter().copied().fold(f64::INFINITY, f64::min),
            mean: defined.iter().sum::<f64>() / defined.len() as f64,
            max: defined.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    };
    (matrix, summary)
}

/// Edge and node overlap coefficients for every topic pair at threshold
/// `theta`: intersection size over the smaller qualifying set.
pub fn overlap_coefficients(graph: &TopicGraph, theta: f64) -> Result<OverlapReport> {
    if !(theta >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "threshold {theta} must be nonnegative"
        )));
    }
    let d = graph.topic_count();
    let edge_sets: Vec<Vec<u32>> = (0..d).map(|t| qualifying_edges(graph, t, theta)).collect();
    let node_sets: Vec<Vec<u32>> = (0..d).map(|t| qualifying_nodes(graph, t, theta)).collect();
    let (edge, edge_summary) = overlap_matrix(&edge_sets);
    let (node, node_summary) = overlap_matrix(&node_sets);
    Ok(OverlapReport {
        theta,
        edge,
        node,
        edge_summary,
        node_summary,
    })
}

/// Average percentage of mixture-greedy seeds that also appear among the
/// seeds of the mixture's constituent topics (run on the unscaled per-topic
/// probabilities).
///
/// Every mixture must have exactly two positive topics. When `index` is
/// given, constituent seed sets come from its full-strength (landmark 1)
/// entries instead of fresh greedy runs.
pub fn seed_source_overlap(
    graph: &TopicGraph,
    mixtures: &[TopicMixture],
    k: u32,
    oracle: OracleConfig,
    index: Option<&LandmarkIndex>,
) -> Result<f64> {
    if mixtures.is_empty() {
        return Err(Error::InvalidInput("no mixtures given".into()));
    }
    for m in mixtures {
        if m.positive_topics().count() != 2 {
            return Err(Error::InvalidInput(
                "seed-source overlap expects two-topic mixtures".into(),
            ));
        }
        if m.dimension() != graph.topic_count() as usize {
            return Err(Error::InvalidInput(format!(
                "mixture has {} topics, graph has {}",
                m.dimension(),
                graph.topic_count()
            )));
        }
    }

    // Constituent seed sets depend only on the topic; compute each once.
    let mut constituent: Vec<Option<HashSet<NodeId>>> =
        vec![None; graph.topic_count() as usize];
    let mut topic_seeds = |topic: usize| -> Result<HashSet<NodeId>> {
        if let Some(set) = &constituent[topic] {
            return Ok(set.clone());
        }
        let set: HashSet<NodeId> = match index {
            Some(idx) => idx
                .entry_at(topic, 1.0)
                .ok_or_else(|| Error::InvalidInput("index lacks landmark 1".into()))?
                .result
                .records
                .iter()
                .take(k as usize)
                .map(|r| r.node)
                .collect(),
            None => {
                let probs = graph.scale_topic(topic as u32, 1.0)?;
                let label = format!("topic={topic}");
                selection::greedy_select(graph, &probs, k, oracle, label)?
                    .seeds()
                    .into_iter()
                    .collect()
            }
        };
        constituent[topic] = Some(set.clone());
        Ok(set)
    };

    let mut total = 0.0;
    for mixture in mixtures {
        let topics: Vec<usize> = mixture.positive_topics().collect();
        let mixed = graph.mix_probabilities(mixture)?;
        let mix_seeds =
            selection::greedy_select(graph, &mixed, k, oracle, "mixture")?.seeds();
        let mut union = topic_seeds(topics[0])?;
        union.extend(topic_seeds(topics[1])?);
        let hits = mix_seeds.iter().filter(|s| union.contains(s)).count();
        total += hits as f64 / mix_seeds.len() as f64;
    }
    Ok(100.0 * total / mixtures.len() as f64)
}

/// Replaces every probability above `cutoff` with a draw from the empirical
/// distribution of the same topic's values below the cutoff.
///
/// Deterministic given the seed; only above-cutoff entries change, and entry
/// count is preserved.
pub fn smooth_probabilities(graph: &TopicGraph, cutoff: f64, seed: u64) -> Result<TopicGraph> {
    if !(0.0..=1.0).contains(&cutoff) {
        return Err(Error::InvalidInput(format!(
            "cutoff {cutoff} outside [0,1]"
        )));
    }
    let d = graph.topic_count() as usize;
    let mut support: Vec<Vec<f64>> = vec![Vec::new(); d];
    let mut needs_smoothing = vec![false; d];
    for (_, _, topic, p) in graph.entries() {
        if p > cutoff {
            needs_smoothing[topic as usize] = true;
        } else if p < cutoff {
            support[topic as usize].push(p);
        }
    }
    for topic in 0..d {
        if needs_smoothing[topic] && support[topic].is_empty() {
            return Err(Error::CannotSmooth { topic, cutoff });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries: Vec<_> = graph
        .entries()
        .map(|(u, v, topic, p)| {
            if p > cutoff {
                let pool = &support[topic as usize];
                (u, v, topic, pool[rng.gen_range(0..pool.len())])
            } else {
                (u, v, topic, p)
            }
        })
        .collect();
    TopicGraph::from_entries(graph.node_count(), graph.topic_count(), entries)
}

/// Spread of a greedy seed set scaled by 1/(1 - e^{-1}); an upper bound on
/// the optimal spread by the greedy guarantee.
pub fn offline_bound(greedy_spread: f64) -> f64 {
    greedy_spread / (1.0 - (-1.0f64).exp())
}

/// Upper bound on the optimal k-seed spread: for each candidate base set S
/// (the empty set plus any provided sets), σ(S) plus the k largest marginal
/// influences of nodes outside S; the minimum over base sets.
pub fn online_bound(
    graph: &TopicGraph,
    probs: &EdgeProbs,
    candidate_sets: &[Vec<NodeId>],
    k: u32,
    oracle: OracleConfig,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    for set in candidate_sets {
        if set.len() > k as usize {
            return Err(Error::InvalidInput(format!(
                "candidate set of size {} exceeds k={k}",
                set.len()
            )));
        }
    }
    let empty: Vec<NodeId> = Vec::new();
    let mut best = f64::INFINITY;
    for base in std::iter::once(&empty).chain(candidate_sets.iter()) {
        let base_spread = diffusion::spread(graph, probs, base, oracle)?;
        let mut gains: Vec<f64> = (0..graph.node_count())
            .filter(|v| !base.contains(v))
            .map(|v| diffusion::marginal_influence(graph, probs, base, v, oracle))
            .collect::<Result<_>>()?;
        gains.sort_by(|a, b| b.total_cmp(a));
        let top: f64 = gains.iter().take(k as usize).sum();
        best = best.min(base_spread + top);
    }
    Ok(best)
}

/// Topic-mixture sampling modes.
#[derive(Clone, Debug, PartialEq)]
pub enum MixtureSampler {
    /// A uniformly random topic pair with a uniform weight split.
    UniformPairs,
    /// Dirichlet(α) draws, weak weights eliminated at the 0.01 floor.
    Dirichlet { alpha: Vec<f64> },
}

/// Draws `count` mixtures over `d` topics, deterministic given the seed.
pub fn sample_mixtures(
    sampler: &MixtureSampler,
    count: usize,
    d: usize,
    seed: u64,
) -> Result<Vec<TopicMixture>> {
    if count == 0 {
        return Err(Error::InvalidInput("count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match sampler {
        MixtureSampler::UniformPairs => {
            if d < 2 {
                return Err(Error::InvalidInput(
                    "pair sampling needs at least two topics".into(),
                ));
            }
            (0..count)
                .map(|_| {
                    let i = rng.gen_range(0..d);
                    let j = loop {
                        let j = rng.gen_range(0..d);
                        if j != i {
                            break j;
                        }
                    };
                    let w = loop {
                        let w: f64 = rng.gen_range(0.0..1.0);
                        if w > 0.0 {
                            break w;
                        }
                    };
                    let mut weights = vec![0.0; d];
                    weights[i] = w;
                    weights[j] = 1.0 - w;
                    TopicMixture::new(weights)
                })
                .collect()
        }
        MixtureSampler::Dirichlet { alpha } => {
            if alpha.len() != d {
                return Err(Error::InvalidInput(format!(
                    "alpha has {} entries for {d} topics",
                    alpha.len()
                )));
            }
            if alpha.iter().any(|a| !a.is_finite() || *a <= 0.0) {
                return Err(Error::InvalidInput(
                    "Dirichlet concentration parameters must be positive".into(),
                ));
            }
            let dist = Dirichlet::new(alpha)
                .map_err(|e| Error::InvalidInput(format!("bad Dirichlet parameters: {e}")))?;
            (0..count)
                .map(|_| {
                    let raw = dist.sample(&mut rng);
                    normalize_mixture(&raw, crate::graph::MIXTURE_WEIGHT_FLOOR)
                })
                .collect()
        }
    }
}

/// Statistics over one topic's nonzero probabilities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbabilityStats {
    pub nonzero: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub std_dev: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
}

/// Linear interpolation between order statistics of a sorted sample.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Per-topic statistics over nonzero probabilities; `None` for topics with
/// no nonzero entries.
pub fn probability_stats(graph: &TopicGraph) -> Vec<Option<ProbabilityStats>> {
    let d = graph.topic_count() as usize;
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); d];
    for (_, _, topic, p) in graph.entries() {
        values[topic as usize].push(p);
    }
    values
        .into_iter()
        .map(|mut vals| {
            if vals.is_empty() {
                return None;
            }
            vals.sort_by(|a, b| a.total_cmp(b));
            let n = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / n;
            let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            Some(ProbabilityStats {
                nonzero: vals.len(),
                mean,
                std_dev: var.sqrt(),
                p25: percentile(&vals, 0.25),
                p50: percentile(&vals, 0.50),
                p75: percentile(&vals, 0.75),
            })
        })
        .collect()
}
