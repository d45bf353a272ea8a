//! Landmark preprocessing: for every (topic, landmark) pair, the greedy seed
//! set under the scaled probability function, its per-seed marginal
//! influences, and its total spread, persisted in a text index keyed to the
//! graph it was built from.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::diffusion::{self, OracleConfig};
use crate::error::{Error, Result};
use crate::graph::{EdgeProbs, TopicGraph};
use crate::selection::{self, GreedyResult, SeedRecord};

/// Sorted distinct scale factors spanning [0,1]; queries round mixture
/// weights onto these.
#[derive(Clone, Debug, PartialEq)]
pub struct LandmarkSet {
    values: Vec<f64>,
}

impl LandmarkSet {
    /// Validates: strictly increasing after sorting, first value 0, last 1.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("landmark values must be finite".into()));
        }
        values.sort_by(|a, b| a.total_cmp(b));
        if values.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("landmark values must be distinct".into()));
        }
        match (values.first(), values.last()) {
            (Some(&0.0), Some(&1.0)) => Ok(LandmarkSet { values }),
            _ => Err(Error::InvalidInput(
                "landmarks must start at 0 and end at 1".into(),
            )),
        }
    }

    /// `count` equally spaced landmarks from 0 to 1; `count >= 2`.
    pub fn uniform(count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidInput(
                "need at least the two endpoint landmarks".into(),
            ));
        }
        let m = (count - 1) as f64;
        LandmarkSet::new((0..count).map(|j| j as f64 / m).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Position of an exact landmark value, if present.
    pub fn position(&self, value: f64) -> Option<usize> {
        self.values
            .binary_search_by(|v| v.total_cmp(&value))
            .ok()
    }
}

/// One precomputed (topic, landmark) cell.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexEntry {
    pub topic: usize,
    pub landmark: f64,
    pub result: GreedyResult,
    /// Spread of the full stored seed set; equals the last record's
    /// cumulative spread.
    pub spread: f64,
    /// Standard error of `spread` when the oracle was Monte Carlo.
    pub std_error: Option<f64>,
}

/// The persisted preprocessing output: one [`IndexEntry`] per
/// (topic, landmark) pair, plus the configuration that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct LandmarkIndex {
    pub fingerprint: String,
    pub k: u32,
    pub topic_count: usize,
    pub landmarks: LandmarkSet,
    pub selector: String,
    pub oracle: OracleConfig,
    /// Topic-major, landmark-minor; length `topic_count * landmarks.len()`.
    entries: Vec<IndexEntry>,
}

impl LandmarkIndex {
    /// Assembles an index from parts, checking completeness and order.
    pub fn from_parts(
        fingerprint: String,
        k: u32,
        topic_count: usize,
        landmarks: LandmarkSet,
        selector: String,
        oracle: OracleConfig,
        entries: Vec<IndexEntry>,
    ) -> Result<Self> {
        if entries.len() != topic_count * landmarks.len() {
            return Err(Error::InvalidInput(format!(
                "index has {} entries, expected {} ({} topics x {} landmarks)",
                entries.len(),
                topic_count * landmarks.len(),
                topic_count,
                landmarks.len()
            )));
        }
        for (i, entry) in entries.iter().enumerate() {
            let topic = i / landmarks.len();
            let landmark = landmarks.values()[i % landmarks.len()];
            if entry.topic != topic || entry.landmark != landmark {
                return Err(Error::InvalidInput(format!(
                    "entry {i} is (topic {}, landmark {}), expected (topic {topic}, landmark {landmark})",
                    entry.topic, entry.landmark
                )));
            }
        }
        Ok(LandmarkIndex {
            fingerprint,
            k,
            topic_count,
            landmarks,
            selector,
            oracle,
            entries,
        })
    }

    pub fn entries(&self) -> &[IndexEntry] {
        &self.entries
    }

    pub fn entry(&self, topic: usize, landmark_pos: usize) -> &IndexEntry {
        &self.entries[topic * self.landmarks.len() + landmark_pos]
    }

    /// Entry for an exact landmark value.
    pub fn entry_at(&self, topic: usize, landmark: f64) -> Option<&IndexEntry> {
        self.landmarks
            .position(landmark)
            .map(|pos| self.entry(topic, pos))
    }

    /// Verifies the index was built from the graph with this fingerprint.
    pub fn check_fingerprint(&self, graph_fingerprint: &str) -> Result<()> {
        if self.fingerprint == graph_fingerprint {
            Ok(())
        } else {
            Err(Error::StaleIndex {
                index: self.fingerprint.clone(),
                graph: graph_fingerprint.to_string(),
            })
        }
    }

    /// Maximum ratio of adjacent-landmark spreads, floored at 1.
    ///
    /// Rounding maps any scale factor to a pair of adjacent landmarks, so
    /// the maximum over those pairs equals the supremum over all factors in
    /// [0,1]. Monte Carlo noise can push the raw ratio fractionally below 1;
    /// see [`LandmarkIndex::mu_max_raw`] for the unfloored value.
    pub fn mu_max(&self) -> f64 {
        self.mu_max_raw().max(1.0)
    }

    /// The unfloored adjacent-spread ratio maximum.
    pub fn mu_max_raw(&self) -> f64 {
        let m = self.landmarks.len();
        let mut worst = f64::NEG_INFINITY;
        for topic in 0..self.topic_count {
            for j in 0..m - 1 {
                // Spreads are at least min(k, n) >= 1: every seed activates
                // itself. No division guard needed.
                let ratio = self.entry(topic, j + 1).spread / self.entry(topic, j).spread;
                worst = worst.max(ratio);
            }
        }
        worst
    }

    /// Serializes the index in the `timax-index v1` text format. Decimal
    /// fields round-trip exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let landmark_list = self
            .landmarks
            .values()
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        writeln!(
            out,
            "timax-index v1 fingerprint={} k={} topics={} landmarks={} selector={} oracle={}",
            self.fingerprint, self.k, self.topic_count, landmark_list, self.selector, self.oracle
        )
        .unwrap();
        for entry in &self.entries {
            let se = match entry.std_error {
                Some(se) => se.to_string(),
                None => "NA".to_string(),
            };
            writeln!(
                out,
                "entry topic={} landmark={} spread={} se={}",
                entry.topic, entry.landmark, entry.spread, se
            )
            .unwrap();
            for rec in &entry.result.records {
                writeln!(
                    out,
                    "{} {} {} {}",
                    rec.rank, rec.node, rec.marginal_influence, rec.cumulative_spread
                )
                .unwrap();
            }
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        file.write_all(self.to_text().as_bytes())?;
        Ok(())
    }

    /// Parses and validates the text format.
    pub fn from_text(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| format_err(1, "empty file, expected header"))?;
        let header = header.map_err(Error::Io)?;
        let parsed = parse_index_header(&header)?;

        let mut entries: Vec<IndexEntry> = Vec::new();
        let mut current: Option<(IndexEntry, usize)> = None;
        for (idx, line) in lines {
            let lineno = idx + 1;
            let line = line.map_err(Error::Io)?;
            if line.trim().is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("entry ") {
                if let Some((entry, _)) = current.take() {
                    entries.push(entry);
                }
                current = Some((parse_entry_line(rest, lineno, &parsed)?, lineno));
            } else {
                let (entry, _) = current
                    .as_mut()
                    .ok_or_else(|| format_err(lineno, "seed record before any entry line"))?;
                let mut fields = line.split_whitespace();
                let mut next = |name: &str| {
                    fields
                        .next()
                        .ok_or_else(|| format_err(lineno, &format!("missing {name}")))
                };
                let rank: u32 = parse_field(next("rank")?, lineno, "rank")?;
                let node: u32 = parse_field(next("node")?, lineno, "node")?;
                let mi: f64 = parse_field(next("marginal influence")?, lineno, "marginal influence")?;
                let cum: f64 = parse_field(next("cumulative spread")?, lineno, "cumulative spread")?;
                if fields.next().is_some() {
                    return Err(format_err(lineno, "trailing fields"));
                }
                let expected = entry.result.records.len() as u32 + 1;
                if rank != expected {
                    return Err(format_err(
                        lineno,
                        &format!("rank {rank} out of order, expected {expected}"),
                    ));
                }
                if rank > parsed.k {
                    return Err(format_err(lineno, "more seed records than k"));
                }
                if entry.result.records.iter().any(|r| r.node == node) {
                    return Err(format_err(lineno, &format!("duplicate seed node {node}")));
                }
                entry.result.records.push(SeedRecord {
                    node,
                    rank,
                    marginal_influence: mi,
                    cumulative_spread: cum,
                });
            }
        }
        if let Some((entry, _)) = current.take() {
            entries.push(entry);
        }

        // Entries may appear in any order; re-assemble canonically and
        // require exactly one per (topic, landmark).
        let m = parsed.landmarks.len();
        let expected = parsed.topics * m;
        let mut slots: Vec<Option<IndexEntry>> = vec![None; expected];
        for entry in entries {
            let pos = parsed
                .landmarks
                .position(entry.landmark)
                .expect("validated during entry parse");
            let slot = entry.topic * m + pos;
            if slots[slot].is_some() {
                return Err(format_err(
                    0,
                    &format!(
                        "duplicate entry for topic {} landmark {}",
                        entry.topic, entry.landmark
                    ),
                ));
            }
            slots[slot] = Some(entry);
        }
        let mut ordered = Vec::with_capacity(expected);
        for (slot, entry) in slots.into_iter().enumerate() {
            match entry {
                Some(mut e) => {
                    // Per-entry run streams are derived from the header
                    // oracle and the entry position, not persisted.
                    e.result.oracle = entry_oracle(parsed.oracle, slot);
                    ordered.push(e);
                }
                None => {
                    return Err(format_err(
                        0,
                        &format!(
                            "missing entry for topic {} landmark {}",
                            slot / m,
                            parsed.landmarks.values()[slot % m]
                        ),
                    ))
                }
            }
        }

        LandmarkIndex::from_parts(
            parsed.fingerprint,
            parsed.k,
            parsed.topics,
            parsed.landmarks,
            parsed.selector,
            parsed.oracle,
            ordered,
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_text(BufReader::new(file))
    }
}

struct IndexHeader {
    fingerprint: String,
    k: u32,
    topics: usize,
    landmarks: LandmarkSet,
    selector: String,
    oracle: OracleConfig,
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

fn parse_index_header(header: &str) -> Result<IndexHeader> {
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("timax-index") {
        return Err(format_err(1, "expected `timax-index` header"));
    }
    if tokens.next() != Some("v1") {
        return Err(format_err(1, "unsupported format version, expected v1"));
    }
    let mut fingerprint = None;
    let mut k = None;
    let mut topics = None;
    let mut landmarks = None;
    let mut selector = None;
    let mut oracle = None;
    for token in tokens {
        match token.split_once('=') {
            Some(("fingerprint", v)) => fingerprint = Some(v.to_string()),
            Some(("k", v)) => k = Some(parse_field(v, 1, "k")?),
            Some(("topics", v)) => topics = Some(parse_field(v, 1, "topics")?),
            Some(("landmarks", v)) => {
                let values = v
                    .split(',')
                    .map(|x| parse_field(x, 1, "landmark"))
                    .collect::<Result<Vec<f64>>>()?;
                landmarks = Some(LandmarkSet::new(values).map_err(|e| match e {
                    Error::InvalidInput(msg) => format_err(1, &msg),
                    other => other,
                })?);
            }
            Some(("selector", v)) => selector = Some(v.to_string()),
            Some(("oracle", v)) => {
                oracle = Some(v.parse::<OracleConfig>().map_err(|_| {
                    format_err(1, &format!("cannot parse oracle from {v:?}"))
                })?)
            }
            _ => return Err(format_err(1, &format!("unexpected header token {token:?}"))),
        }
    }
    match (fingerprint, k, topics, landmarks, selector, oracle) {
        (Some(fingerprint), Some(k), Some(topics), Some(landmarks), Some(selector), Some(oracle)) => {
            Ok(IndexHeader {
                fingerprint,
                k,
                topics,
                landmarks,
                selector,
                oracle,
            })
        }
        _ => Err(format_err(1, "header is missing required fields")),
    }
}

fn parse_entry_line(rest: &str, lineno: usize, header: &IndexHeader) -> Result<IndexEntry> {
    let mut topic = None;
    let mut landmark = None;
    let mut spread = None;
    let mut se = None;
    for token in rest.split_whitespace() {
        match token.split_once('=') {
            Some(("topic", v)) => topic = Some(parse_field(v, lineno, "topic")?),
            Some(("landmark", v)) => landmark = Some(parse_field(v, lineno, "landmark")?),
            Some(("spread", v)) => spread = Some(parse_field(v, lineno, "spread")?),
            Some(("se", "NA")) => se = Some(None),
            Some(("se", v)) => se = Some(Some(parse_field(v, lineno, "se")?)),
            _ => return Err(format_err(lineno, &format!("unexpected entry token {token:?}"))),
        }
    }
    let (topic, landmark, spread, se) = match (topic, landmark, spread, se) {
        (Some(t), Some(l), Some(s), Some(se)) => (t, l, s, se),
        _ => return Err(format_err(lineno, "entry line is missing required fields")),
    };
    if topic >= header.topics {
        return Err(format_err(lineno, &format!("topic {topic} out of range")));
    }
    if header.landmarks.position(landmark).is_none() {
        return Err(format_err(
            lineno,
            &format!("landmark {landmark} not in the landmark set"),
        ));
    }
    Ok(IndexEntry {
        topic,
        landmark,
        result: GreedyResult {
            records: Vec::new(),
            probability_id: entry_label(topic, landmark),
            oracle: header.oracle,
        },
        spread,
        std_error: se,
    })
}

fn entry_label(topic: usize, landmark: f64) -> String {
    format!("topic={topic} landmark={landmark}")
}

/// The oracle one entry runs under: exact stays exact, Monte Carlo gets a
/// run stream derived from the entry's flat position so entries are
/// independent and order-insensitive.
fn entry_oracle(oracle: OracleConfig, slot: usize) -> OracleConfig {
    match oracle {
        OracleConfig::Exact => OracleConfig::Exact,
        OracleConfig::MonteCarlo { runs, seed } => OracleConfig::MonteCarlo {
            runs,
            seed: diffusion::derive_seed(seed, slot as u64),
        },
    }
}

/// A pluggable per-entry seed selector. Only greedy ships; the interface
/// exists so faster heuristics can back the same index.
pub trait SeedSelector: Sync {
    fn name(&self) -> &str;

    fn select(
        &self,
        graph: &TopicGraph,
        probs: &EdgeProbs,
        k: u32,
        oracle: OracleConfig,
        label: &str,
    ) -> Result<GreedyResult>;
}

/// Greedy selection with lazy evaluation.
pub struct GreedySelector;

impl SeedSelector for GreedySelector {
    fn name(&self) -> &str {
        "greedy"
    }

    fn select(
        &self,
        graph: &TopicGraph,
        probs: &EdgeProbs,
        k: u32,
        oracle: OracleConfig,
        label: &str,
    ) -> Result<GreedyResult> {
        selection::greedy_select(graph, probs, k, oracle, label)
    }
}

/// Builds the full landmark index: one selector run per (topic, landmark)
/// pair on the scaled probability function `λ · p_i`.
///
/// Entries are independent jobs; with a Monte Carlo oracle each entry draws
/// its run stream from a seed derived from the entry's position, so the
/// result is identical regardless of worker count. Pass `workers` to bound
/// parallelism, or `None` to use the ambient thread pool.
pub fn build_index(
    graph: &TopicGraph,
    k: u32,
    landmarks: &LandmarkSet,
    selector: &dyn SeedSelector,
    oracle: OracleConfig,
    workers: Option<usize>,
) -> Result<LandmarkIndex> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let run = || build_entries(graph, k, landmarks, selector, oracle);
    let entries = match workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidInput(format!("cannot build worker pool: {e}")))?;
            pool.install(run)?
        }
        None => run()?,
    };
    LandmarkIndex::from_parts(
        graph.fingerprint(),
        k,
        graph.topic_count() as usize,
        landmarks.clone(),
        selector.name().to_string(),
        oracle,
        entries,
    )
}

fn build_entries(
    graph: &TopicGraph,
    k: u32,
    landmarks: &LandmarkSet,
    selector: &dyn SeedSelector,
    oracle: OracleConfig,
) -> Result<Vec<IndexEntry>> {
    let m = landmarks.len();
    let jobs: Vec<(usize, usize)> = (0..graph.topic_count() as usize)
        .flat_map(|topic| (0..m).map(move |pos| (topic, pos)))
        .collect();
    jobs.into_par_iter()
        .map(|(topic, pos)| {
            let landmark = landmarks.values()[pos];
            build_entry(graph, k, topic, landmark, pos, m, selector, oracle).map_err(|e| {
                Error::EntryFailed {
                    topic,
                    landmark,
                    source: Box::new(e),
                }
            })
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn build_entry(
    graph: &TopicGraph,
    k: u32,
    topic: usize,
    landmark: f64,
    pos: usize,
    landmark_count: usize,
    selector: &dyn SeedSelector,
    oracle: OracleConfig,
) -> Result<IndexEntry> {
    let probs = graph.scale_topic(topic as u32, landmark)?;
    let entry_oracle = entry_oracle(oracle, topic * landmark_count + pos);
    let label = entry_label(topic, landmark);
    let result = selector.select(graph, &probs, k, entry_oracle, &label)?;
    let spread = result.total_spread();
    let std_error = match entry_oracle {
        OracleConfig::Exact => None,
        OracleConfig::MonteCarlo { runs, seed } => {
            let est = diffusion::simulate_spread(graph, &probs, &result.seeds(), runs, seed)?;
            debug_assert_eq!(est.mean, spread);
            Some(est.std_error)
        }
    };
    Ok(IndexEntry {
        topic,
        landmark,
        result,
        spread,
        std_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::exact_spread;

    fn entry_for_tests(
        topic: usize,
        landmark: f64,
        seeds: &[(u32, f64)],
        oracle: OracleConfig,
    ) -> IndexEntry {
        let mut records = Vec::new();
        let mut cum = 0.0;
        for (i, &(node, mi)) in seeds.iter().enumerate() {
            cum += mi;
            records.push(SeedRecord {
                node,
                rank: i as u32 + 1,
                marginal_influence: mi,
                cumulative_spread: cum,
            });
        }
        IndexEntry {
            topic,
            landmark,
            spread: cum,
            std_error: None,
            result: GreedyResult {
                records,
                probability_id: entry_label(topic, landmark),
                oracle,
            },
        }
    }

    #[test]
    fn landmark_set_validation() {
        assert!(LandmarkSet::new(vec![0.0, 0.5, 1.0]).is_ok());
        assert!(LandmarkSet::new(vec![0.1, 0.5, 1.0]).is_err());
        assert!(LandmarkSet::new(vec![0.0, 0.5]).is_err());
        assert!(LandmarkSet::new(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        let uniform = LandmarkSet::uniform(11).unwrap();
        assert_eq!(uniform.len(), 11);
        assert_eq!(uniform.values()[0], 0.0);
        assert_eq!(uniform.values()[10], 1.0);
        assert!((uniform.values()[3] - 0.3).abs() < 1e-15);
    }

    fn two_topic_graph() -> TopicGraph {
        // Topic 0 lives on component {0,1,2}, topic 1 on {3,4}.
        TopicGraph::from_entries(
            5,
            2,
            vec![
                (0, 1, 0, 0.8),
                (0, 2, 0, 0.8),
                (3, 4, 1, 0.6),
            ],
        )
        .unwrap()
    }

    #[test]
    fn build_produces_one_entry_per_topic_landmark_pair() {
        let g = two_topic_graph();
        let landmarks = LandmarkSet::new(vec![0.0, 0.5, 1.0]).unwrap();
        let index = build_index(&g, 2, &landmarks, &GreedySelector, OracleConfig::Exact, None)
            .unwrap();
        assert_eq!(index.entries().len(), 6);
        assert_eq!(index.topic_count, 2);
    }

    #[test]
    fn zero_landmark_entry_is_self_activation_only() {
        let g = two_topic_graph();
        let landmarks = LandmarkSet::new(vec![0.0, 1.0]).unwrap();
        let index = build_index(&g, 2, &landmarks, &GreedySelector, OracleConfig::Exact, None)
            .unwrap();
        let entry = index.entry_at(0, 0.0).unwrap();
        // All probabilities zero: the two lowest-id nodes win the ties, each
        // activating only itself.
        assert_eq!(entry.result.seeds(), vec![0, 1]);
        assert!(entry
            .result
            .records
            .iter()
            .all(|r| (r.marginal_influence - 1.0).abs() < 1e-12));
        assert_eq!(entry.spread, 2.0);
    }

    #[test]
    fn topic_entry_seeds_come_from_its_component() {
        let g = two_topic_graph();
        let landmarks = LandmarkSet::new(vec![0.0, 1.0]).unwrap();
        let index = build_index(&g, 1, &landmarks, &GreedySelector, OracleConfig::Exact, None)
            .unwrap();
        // Topic 1 at full strength: node 3 is the only productive source.
        let entry = index.entry_at(1, 1.0).unwrap();
        assert_eq!(entry.result.seeds(), vec![3]);
        let probs = g.scale_topic(1, 1.0).unwrap();
        let expect = exact_spread(&g, &probs, &[3]).unwrap();
        assert!((entry.spread - expect).abs() < 1e-12);
    }

    #[test]
    fn mu_max_examples() {
        let landmarks = LandmarkSet::new(vec![0.0, 1.0]).unwrap();
        let equal = LandmarkIndex::from_parts(
            "fp".into(),
            2,
            1,
            landmarks.clone(),
            "greedy".into(),
            OracleConfig::Exact,
            vec![
                entry_for_tests(0, 0.0, &[(0, 1.0), (1, 1.0)], OracleConfig::Exact),
                entry_for_tests(0, 1.0, &[(0, 1.0), (1, 1.0)], OracleConfig::Exact),
            ],
        )
        .unwrap();
        assert_eq!(equal.mu_max(), 1.0);

        let ratio = LandmarkIndex::from_parts(
            "fp".into(),
            2,
            1,
            landmarks,
            "greedy".into(),
            OracleConfig::Exact,
            vec![
                entry_for_tests(0, 0.0, &[(0, 1.0), (1, 1.0)], OracleConfig::Exact),
                entry_for_tests(0, 1.0, &[(0, 2.0), (1, 1.0)], OracleConfig::Exact),
            ],
        )
        .unwrap();
        assert!((ratio.mu_max() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn spread_non_decreasing_across_landmarks_with_exact_oracle() {
        let g = two_topic_graph();
        let landmarks = LandmarkSet::uniform(6).unwrap();
        let index = build_index(&g, 2, &landmarks, &GreedySelector, OracleConfig::Exact, None)
            .unwrap();
        for topic in 0..2 {
            for j in 0..landmarks.len() - 1 {
                assert!(
                    index.entry(topic, j + 1).spread >= index.entry(topic, j).spread - 1e-12
                );
            }
        }
        assert!(index.mu_max() >= 1.0);
    }

    #[test]
    fn save_load_round_trip_is_bit_exact() {
        let g = two_topic_graph();
        let landmarks = LandmarkSet::new(vec![0.0, 0.5, 1.0]).unwrap();
        let index = build_index(
            &g,
            2,
            &landmarks,
            &GreedySelector,
            OracleConfig::MonteCarlo { runs: 200, seed: 7 },
            None,
        )
        .unwrap();
        let text = index.to_text();
        let reloaded = LandmarkIndex::from_text(text.as_bytes()).unwrap();
        assert_eq!(reloaded, index);
        assert_eq!(reloaded.to_text(), text);
    }

    #[test]
    fn stale_fingerprint_is_detected() {
        let g = two_topic_graph();
        let landmarks = LandmarkSet::new(vec![0.0, 1.0]).unwrap();
        let index = build_index(&g, 1, &landmarks, &GreedySelector, OracleConfig::Exact, None)
            .unwrap();
        assert!(index.check_fingerprint(&g.fingerprint()).is_ok());
        assert!(matches!(
            index.check_fingerprint("deadbeef"),
            Err(Error::StaleIndex { .. })
        ));
    }

    #[test]
    fn truncated_file_is_a_format_error() {
        let g = two_topic_graph();
        let landmarks = LandmarkSet::new(vec![0.0, 1.0]).unwrap();
        let index = build_index(&g, 2, &landmarks, &GreedySelector, OracleConfig::Exact, None)
            .unwrap();
        let text = index.to_text();
        let truncated: String = text.lines().take(3).collect::<Vec<_>>().join("\n");
        assert!(matches!(
            LandmarkIndex::from_text(truncated.as_bytes()),
            Err(Error::Format { .. })
        ));
    }

    #[test]
    fn build_is_deterministic_across_worker_counts() {
        let g = two_topic_graph();
        let landmarks = LandmarkSet::new(vec![0.0, 0.5, 1.0]).unwrap();
        let oracle = OracleConfig::MonteCarlo { runs: 100, seed: 3 };
        let one = build_index(&g, 2, &landmarks, &GreedySelector, oracle, Some(1)).unwrap();
        let four = build_index(&g, 2, &landmarks, &GreedySelector, oracle, Some(4)).unwrap();
        assert_eq!(one, four);
        assert_eq!(one.to_text(), four.to_text());
    }
}
