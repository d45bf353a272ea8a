//! Directed social graphs with per-topic influence probabilities, topic
//! mixtures, and the mixed edge-probability functions derived from them.
//!
//! A [`TopicGraph`] stores a directed graph together with `d` per-topic
//! probability tables. Edges absent from the graph have implicit probability
//! zero on every topic, and self-loops may not carry nonzero probability.
//! Probabilities equal to zero are omitted from storage, so the per-edge
//! topic lists are sparse.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::ops::Range;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Dense node identifier in `[0, node_count)`.
pub type NodeId = u32;

/// Default elimination floor for weak mixture weights.
pub const MIXTURE_WEIGHT_FLOOR: f64 = 0.01;

/// Negative weights within this tolerance of zero are clamped to zero;
/// anything more negative is rejected.
const NEGATIVE_WEIGHT_TOLERANCE: f64 = 1e-12;

/// Absolute tolerance on the sum-to-one mixture invariant.
const MIXTURE_SUM_TOLERANCE: f64 = 1e-9;

/// A directed graph with per-topic influence probabilities.
///
/// Edges are held in compressed sparse rows keyed by source node; each edge
/// carries a sorted sparse list of `(topic, probability)` entries.
/// Immutable after construction, so it is safe to share across workers.
#[derive(Clone, Debug)]
pub struct TopicGraph {
    node_count: u32,
    topic_count: u32,
    /// CSR row starts into `targets`/`sources`, length `node_count + 1`.
    offsets: Vec<u32>,
    targets: Vec<NodeId>,
    sources: Vec<NodeId>,
    /// Per-edge slice bounds into `entry_topics`/`entry_probs`,
    /// length `edge_count + 1`.
    entry_offsets: Vec<u32>,
    entry_topics: Vec<u32>,
    entry_probs: Vec<f64>,
}

impl TopicGraph {
    /// Builds a graph from `(source, target, topic, probability)` entries.
    ///
    /// Zero-probability entries are dropped (absent means zero). Duplicate
    /// `(source, target, topic)` entries and self-loops with nonzero
    /// probability are rejected.
    pub fn from_entries(
        node_count: u32,
        topic_count: u32,
        entries: impl IntoIterator<Item = (NodeId, NodeId, u32, f64)>,
    ) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidInput("node count must be positive".into()));
        }
        if topic_count == 0 {
            return Err(Error::InvalidInput("topic count must be positive".into()));
        }
        let mut kept: Vec<(NodeId, NodeId, u32, f64)> = Vec::new();
        for (u, v, topic, p) in entries {
            if u >= node_count || v >= node_count {
                return Err(Error::InvalidInput(format!(
                    "edge ({u},{v}) references a node outside [0,{node_count})"
                )));
            }
            if topic >= topic_count {
                return Err(Error::InvalidInput(format!(
                    "topic {topic} outside [0,{topic_count})"
                )));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidInput(format!(
                    "probability {p} for edge ({u},{v}) topic {topic} outside [0,1]"
                )));
            }
            if u == v && p > 0.0 {
                return Err(Error::InvalidInput(format!(
                    "self-loop ({u},{u}) carries nonzero probability {p}"
                )));
            }
            if p > 0.0 {
                kept.push((u, v, topic, p));
            }
        }
        kept.sort_by_key(|&(u, v, t, _)| (u, v, t));
        for w in kept.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 && w[0].2 == w[1].2 {
                return Err(Error::InvalidInput(format!(
                    "duplicate entry for edge ({},{}) topic {}",
                    w[0].0, w[0].1, w[0].2
                )));
            }
        }

        let mut offsets = Vec::with_capacity(node_count as usize + 1);
        let mut targets = Vec::new();
        let mut sources = Vec::new();
        let mut entry_offsets = vec![0u32];
        let mut entry_topics = Vec::with_capacity(kept.len());
        let mut entry_probs = Vec::with_capacity(kept.len());

        offsets.push(0);
        let mut row = 0u32;
        let mut i = 0;
        while i < kept.len() {
            let (u, v, _, _) = kept[i];
            while row < u {
                offsets.push(targets.len() as u32);
                row += 1;
            }
            targets.push(v);
            sources.push(u);
            while i < kept.len() && kept[i].0 == u && kept[i].1 == v {
                entry_topics.push(kept[i].2);
                entry_probs.push(kept[i].3);
                i += 1;
            }
            entry_offsets.push(entry_topics.len() as u32);
        }
        while row < node_count {
            offsets.push(targets.len() as u32);
            row += 1;
        }

        Ok(TopicGraph {
            node_count,
            topic_count,
            offsets,
            targets,
            sources,
            entry_offsets,
            entry_topics,
            entry_probs,
        })
    }

    pub fn node_count(&self) -> u32 {
        self.node_count
    }

    pub fn topic_count(&self) -> u32 {
        self.topic_count
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    /// Edge-id range of the out-edges of `u`.
    pub fn out_range(&self, u: NodeId) -> Range<usize> {
        self.offsets[u as usize] as usize..self.offsets[u as usize + 1] as usize
    }

    pub fn out_degree(&self, u: NodeId) -> usize {
        self.out_range(u).len()
    }

    pub fn edge_source(&self, edge: usize) -> NodeId {
        self.sources[edge]
    }

    pub fn edge_target(&self, edge: usize) -> NodeId {
        self.targets[edge]
    }

    /// Sparse `(topic, probability)` entries of one edge, sorted by topic.
    pub fn edge_entries(&self, edge: usize) -> impl Iterator<Item = (u32, f64)> + '_ {
        let range = self.entry_offsets[edge] as usize..self.entry_offsets[edge + 1] as usize;
        range.map(move |i| (self.entry_topics[i], self.entry_probs[i]))
    }

    /// Probability of `edge` on `topic`; zero when the entry is absent.
    pub fn topic_prob(&self, edge: usize, topic: u32) -> f64 {
        let lo = self.entry_offsets[edge] as usize;
        let hi = self.entry_offsets[edge + 1] as usize;
        match self.entry_topics[lo..hi].binary_search(&topic) {
            Ok(i) => self.entry_probs[lo + i],
            Err(_) => 0.0,
        }
    }

    /// All stored `(source, target, topic, probability)` entries in canonical
    /// order.
    pub fn entries(&self) -> impl Iterator<Item = (NodeId, NodeId, u32, f64)> + '_ {
        (0..self.edge_count()).flat_map(move |e| {
            self.edge_entries(e)
                .map(move |(t, p)| (self.sources[e], self.targets[e], t, p))
        })
    }

    /// Mixed probability function `p = Σ_i λ_i p_i` for an item mixture.
    pub fn mix_probabilities(&self, mixture: &TopicMixture) -> Result<EdgeProbs> {
        if mixture.dimension() != self.topic_count as usize {
            return Err(Error::InvalidInput(format!(
                "mixture has {} topics, graph has {}",
                mixture.dimension(),
                self.topic_count
            )));
        }
        let weights = mixture.weights();
        let values = (0..self.edge_count())
            .map(|e| {
                let p: f64 = self
                    .edge_entries(e)
                    .map(|(t, p)| weights[t as usize] * p)
                    .sum();
                p.clamp(0.0, 1.0)
            })
            .collect();
        Ok(EdgeProbs { values })
    }

    /// Scaled single-topic probability function `λ · p_i`.
    pub fn scale_topic(&self, topic: u32, lambda: f64) -> Result<EdgeProbs> {
        if topic >= self.topic_count {
            return Err(Error::InvalidInput(format!(
                "topic {topic} outside [0,{})",
                self.topic_count
            )));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidInput(format!(
                "scale factor {lambda} outside [0,1]"
            )));
        }
        let values = (0..self.edge_count())
            .map(|e| (lambda * self.topic_prob(e, topic)).clamp(0.0, 1.0))
            .collect();
        Ok(EdgeProbs { values })
    }

    /// Canonical text serialization (header plus sorted entry lines).
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = String::new();
        writeln!(
            out,
            "timax-graph v1 nodes={} topics={}",
            self.node_count, self.topic_count
        )
        .unwrap();
        for (u, v, t, p) in self.entries() {
            writeln!(out, "{u} {v} {t} {p}").unwrap();
        }
        out.into_bytes()
    }

    /// Hex SHA-256 of the canonical serialization. Used to pair indexes with
    /// the exact graph they were built from.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.canonical_bytes());
        let mut hex = String::with_capacity(64);
        for byte in digest {
            write!(hex, "{byte:02x}").unwrap();
        }
        hex
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(&self.canonical_bytes())?;
        Ok(())
    }

    pub fn to_path(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        self.write_to(&mut file)
    }

    /// Parses the `timax-graph v1` text format.
    pub fn read_from(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| format_err(1, "empty file, expected header"))?;
        let header = header.map_err(Error::Io)?;
        let (node_count, topic_count) = parse_graph_header(&header)?;

        let mut entries = Vec::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            let line = line.map_err(Error::Io)?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let mut field = |name: &str| {
                fields
                    .next()
                    .ok_or_else(|| format_err(lineno, &format!("missing {name}")))
            };
            let u: NodeId = parse_field(field("source")?, lineno, "source")?;
            let v: NodeId = parse_field(field("target")?, lineno, "target")?;
            let t: u32 = parse_field(field("topic")?, lineno, "topic")?;
            let p: f64 = parse_field(field("probability")?, lineno, "probability")?;
            if fields.next().is_some() {
                return Err(format_err(lineno, "trailing fields"));
            }
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(format_err(lineno, "probability outside [0,1]"));
            }
            entries.push((u, v, t, p, lineno));
        }

        // Duplicate (u,v,topic) lines are a format error, reported with the
        // later line number; other validation errors surface via the builder.
        let mut keys: Vec<(NodeId, NodeId, u32, usize)> =
            entries.iter().map(|&(u, v, t, _, l)| (u, v, t, l)).collect();
        keys.sort();
        for w in keys.windows(2) {
            if (w[0].0, w[0].1, w[0].2) == (w[1].0, w[1].1, w[1].2) {
                return Err(format_err(
                    w[1].3,
                    &format!(
                        "duplicate entry for edge ({},{}) topic {}",
                        w[1].0, w[1].1, w[1].2
                    ),
                ));
            }
        }

        TopicGraph::from_entries(
            node_count,
            topic_count,
            entries.iter().map(|&(u, v, t, p, _)| (u, v, t, p)),
        )
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_from(BufReader::new(file))
    }
}

fn format_err(line: usize, msg: &str) -> Error {
    Error::Format {
        line,
        msg: msg.to_string(),
    }
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize, name: &str) -> Result<T> {
    s.parse()
        .map_err(|_| format_err(line, &format!("cannot parse {name} from {s:?}")))
}

fn parse_graph_header(header: &str) -> Result<(u32, u32)> {
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("timax-graph") {
        return Err(format_err(1, "expected `timax-graph` header"));
    }
    if tokens.next() != Some("v1") {
        return Err(format_err(1, "unsupported format version, expected v1"));
    }
    let mut nodes = None;
    let mut topics = None;
    for token in tokens {
        match token.split_once('=') {
            Some(("nodes", v)) => nodes = Some(parse_field(v, 1, "nodes")?),
            Some(("topics", v)) => topics = Some(parse_field(v, 1, "topics")?),
            _ => return Err(format_err(1, &format!("unexpected header token {token:?}"))),
        }
    }
    match (nodes, topics) {
        (Some(n), Some(d)) => Ok((n, d)),
        _ => Err(format_err(1, "header must declare nodes= and topics=")),
    }
}

/// An edge probability function, one value per edge id of the graph it was
/// derived from.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeProbs {
    values: Vec<f64>,
}

impl EdgeProbs {
    pub fn get(&self, edge: usize) -> f64 {
        self.values[edge]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Builds a probability function from raw per-edge values.
    pub fn from_values(graph: &TopicGraph, values: Vec<f64>) -> Result<Self> {
        if values.len() != graph.edge_count() {
            return Err(Error::InvalidInput(format!(
                "{} probability values for {} edges",
                values.len(),
                graph.edge_count()
            )));
        }
        if let Some(bad) = values
            .iter()
            .find(|p| !p.is_finite() || !(0.0..=1.0).contains(*p))
        {
            return Err(Error::InvalidInput(format!(
                "probability {bad} outside [0,1]"
            )));
        }
        Ok(EdgeProbs { values })
    }
}

/// A diffusion item: nonnegative per-topic weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct TopicMixture {
    weights: Vec<f64>,
}

impl TopicMixture {
    /// Validates weights: nonnegative (negatives within 1e-12 are clamped to
    /// zero) and summing to one within 1e-9.
    pub fn new(mut weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidInput("mixture has no topics".into()));
        }
        for w in &mut weights {
            if !w.is_finite() {
                return Err(Error::InvalidInput(format!("weight {w} is not finite")));
            }
            if *w < 0.0 {
                if *w >= -NEGATIVE_WEIGHT_TOLERANCE {
                    *w = 0.0;
                } else {
                    return Err(Error::InvalidInput(format!("negative weight {w}")));
                }
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > MIXTURE_SUM_TOLERANCE {
            return Err(Error::InvalidInput(format!(
                "mixture weights sum to {sum}, expected 1"
            )));
        }
        Ok(TopicMixture { weights })
    }

    pub fn uniform(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidInput("mixture has no topics".into()));
        }
        Ok(TopicMixture {
            weights: vec![1.0 / dimension as f64; dimension],
        })
    }

    pub fn one_hot(dimension: usize, topic: usize) -> Result<Self> {
        if topic >= dimension {
            return Err(Error::InvalidInput(format!(
                "topic {topic} outside [0,{dimension})"
            )));
        }
        let mut weights = vec![0.0; dimension];
        weights[topic] = 1.0;
        Ok(TopicMixture { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, topic: usize) -> f64 {
        self.weights[topic]
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    /// Topics with strictly positive weight.
    pub fn positive_topics(&self) -> impl Iterator<Item = usize> + '_ {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(i, _)| i)
    }
}

/// Zeroes weights below `floor` and renormalizes the remainder to sum one.
pub fn normalize_mixture(raw: &[f64], floor: f64) -> Result<TopicMixture> {
    if raw.is_empty() {
        return Err(Error::InvalidInput("mixture has no topics".into()));
    }
    let mut weights = Vec::with_capacity(raw.len());
    for &w in raw {
        if !w.is_finite() || w < -NEGATIVE_WEIGHT_TOLERANCE {
            return Err(Error::InvalidInput(format!("negative weight {w}")));
        }
        let w = w.max(0.0);
        weights.push(if w < floor { 0.0 } else { w });
    }
    let sum: f64 = weights.iter().sum();
    if sum <= 0.0 {
        return Err(Error::DegenerateMixture { floor });
    }
    for w in &mut weights {
        *w /= sum;
    }
    TopicMixture::new(weights)
}
