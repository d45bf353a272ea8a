//! Synthetic topic graphs for scaled experiments.
//!
//! Each topic owns a contiguous window of nodes; the windows are spaced so
//! adjacent topics share roughly `overlap · window` nodes. At overlap 0 the
//! windows are disjoint blocks, so the output is fully separable (zero node
//! overlap for every topic pair). Edge endpoints are drawn uniformly inside
//! the topic's window.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::TopicGraph;

/// Edge probability assignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbabilityModel {
    /// Uniform choice among {0.1, 0.01, 0.001}: strong, medium, or low
    /// influence.
    Trivalency,
    /// Uniform in (0,1).
    RandomUniform,
}

impl std::str::FromStr for ProbabilityModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trivalency" => Ok(ProbabilityModel::Trivalency),
            "random_uniform" | "random-uniform" => Ok(ProbabilityModel::RandomUniform),
            _ => Err(Error::InvalidInput(format!("unknown probability model {s:?}"))),
        }
    }
}

pub const TRIVALENCY_PROBS: [f64; 3] = [0.1, 0.01, 0.001];

#[derive(Clone, Debug)]
pub struct SynthConfig {
    pub nodes: u32,
    /// Total (edge, topic) probability entries across all topics.
    pub edges: usize,
    pub topics: u32,
    pub model: ProbabilityModel,
    /// 0 = fully separable topic windows, 1 = all topics share every node.
    pub overlap: f64,
    pub seed: u64,
}

/// The contiguous node window assigned to one topic.
fn topic_window(nodes: u32, topics: u32, overlap: f64, topic: u32) -> (u32, u32) {
    let n = nodes as f64;
    let d = topics as f64;
    if topics == 1 {
        return (0, nodes);
    }
    // Window length chosen so adjacent windows intersect in overlap·len
    // nodes while the windows together cover [0, n).
    let len = (n / ((d - 1.0) * (1.0 - overlap) + 1.0)).round().max(2.0) as u32;
    let len = len.min(nodes);
    let start = ((topic as f64) * (n - len as f64) / (d - 1.0)).round() as u32;
    (start.min(nodes - len), len)
}

/// Generates a synthetic graph; deterministic given the seed.
pub fn generate_graph(cfg: &SynthConfig) -> Result<TopicGraph> {
    if cfg.nodes < 2 {
        return Err(Error::InvalidInput("need at least two nodes".into()));
    }
    if cfg.topics == 0 {
        return Err(Error::InvalidInput("need at least one topic".into()));
    }
    if !(0.0..=1.0).contains(&cfg.overlap) {
        return Err(Error::InvalidInput(format!(
            "overlap {} outside [0,1]",
            cfg.overlap
        )));
    }

    // Spread the requested entries evenly over topics.
    let base = cfg.edges / cfg.topics as usize;
    let extra = cfg.edges % cfg.topics as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut entries = Vec::with_capacity(cfg.edges);
    let mut used = std::collections::HashSet::new();

    for topic in 0..cfg.topics {
        let want = base + usize::from((topic as usize) < extra);
        let (start, len) = topic_window(cfg.nodes, cfg.topics, cfg.overlap, topic);
        let capacity = len as usize * (len as usize - 1);
        if want > capacity {
            return Err(Error::InvalidInput(format!(
                "topic {topic} needs {want} edges but its {len}-node window holds only {capacity}"
            )));
        }
        let mut placed = 0;
        while placed < want {
            let u = start + rng.gen_range(0..len);
            let v = start + rng.gen_range(0..len);
            if u == v || !used.insert((u, v, topic)) {
                continue;
            }
            let p = match cfg.model {
                ProbabilityModel::Trivalency => {
                    TRIVALENCY_PROBS[rng.gen_range(0..TRIVALENCY_PROBS.len())]
                }
                ProbabilityModel::RandomUniform => loop {
                    let p: f64 = rng.gen_range(0.0..1.0);
                    if p > 0.0 {
                        break p;
                    }
                },
            };
            entries.push((u, v, topic, p));
            placed += 1;
        }
    }
    TopicGraph::from_entries(cfg.nodes, cfg.topics, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::overlap_coefficients;

    fn config(overlap: f64) -> SynthConfig {
        SynthConfig {
            nodes: 60,
            edges: 120,
            topics: 2,
            model: ProbabilityModel::Trivalency,
            overlap,
            seed: 42,
        }
    }

    #[test]
    fn zero_overlap_is_fully_separable() {
        let g = generate_graph(&config(0.0)).unwrap();
        let report = overlap_coefficients(&g, 0.0).unwrap();
        assert_eq!(report.node[0][1], Some(0.0));
        assert!(report.fully_separable());
    }

    #[test]
    fn positive_overlap_shares_nodes() {
        let g = generate_graph(&config(0.5)).unwrap();
        let report = overlap_coefficients(&g, 0.0).unwrap();
        assert!(report.node[0][1].unwrap_or(0.0) > 0.0);
    }

    #[test]
    fn trivalency_probabilities_come_from_the_menu() {
        let g = generate_graph(&config(0.3)).unwrap();
        for (_, _, _, p) in g.entries() {
            assert!(TRIVALENCY_PROBS.contains(&p), "unexpected probability {p}");
        }
        assert_eq!(g.entries().count(), 120);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_graph(&config(0.3)).unwrap();
        let b = generate_graph(&config(0.3)).unwrap();
        assert_eq!(a.canonical_bytes(), b.canonical_bytes());
    }

    #[test]
    fn infeasible_edge_count_is_rejected() {
        let mut cfg = config(0.0);
        cfg.edges = 100_000;
        assert!(generate_graph(&cfg).is_err());
    }
}
