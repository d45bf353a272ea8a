//! Real-time topic-mixture queries against a prebuilt landmark index.
//!
//! Both algorithms round every mixture weight down onto the landmark set and
//! then work purely from stored records; no diffusion simulation happens
//! online. Best-topic selection returns the stored seed set of the
//! constituent topic whose round-down entry has the largest stored spread.
//! Marginal-influence sort unions the stored seed sets of all positive
//! round-down topics, scores each candidate by the sum of its stored
//! marginal influences, and returns the top k.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::graph::{NodeId, TopicMixture};
use crate::preprocess::{IndexEntry, LandmarkIndex, LandmarkSet};

/// Largest landmark at most `lambda` (so 1 maps to 1).
pub fn round_down(lambda: f64, landmarks: &LandmarkSet) -> Result<f64> {
    check_unit(lambda)?;
    let values = landmarks.values();
    let pos = values.partition_point(|&v| v <= lambda);
    Ok(values[pos - 1])
}

/// Smallest landmark at least `lambda` (so 0 maps to 0).
pub fn round_up(lambda: f64, landmarks: &LandmarkSet) -> Result<f64> {
    check_unit(lambda)?;
    let values = landmarks.values();
    let pos = values.partition_point(|&v| v < lambda);
    Ok(values[pos])
}

fn check_unit(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidInput(format!(
            "scale factor {lambda} outside [0,1]"
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryAlgorithm {
    Bts,
    Mis,
}

impl std::fmt::Display for QueryAlgorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QueryAlgorithm::Bts => write!(f, "bts"),
            QueryAlgorithm::Mis => write!(f, "mis"),
        }
    }
}

/// The outcome of one online query.
#[derive(Clone, Debug)]
pub struct QueryResult {
    pub algorithm: QueryAlgorithm,
    /// Selected seeds, at most k, distinct.
    pub seeds: Vec<NodeId>,
    /// The round-down landmark of each mixture weight.
    pub rounded_mixture: Vec<f64>,
    /// Per-seed summed marginal influence, non-increasing; present for MIS.
    pub scores: Option<Vec<f64>>,
    /// The constituent topic whose stored seed set was returned; present for
    /// BTS.
    pub chosen_topic: Option<usize>,
    /// True when the candidate union held fewer than k nodes and the result
    /// is deliberately short rather than padded.
    pub shortfall: bool,
    /// True when every positive weight rounded down to zero and the query
    /// fell back to the strongest topic's round-up entry.
    pub fallback_used: bool,
    /// Wall-clock time of the online stage.
    pub latency: Duration,
}

fn check_query(index: &LandmarkIndex, mixture: &TopicMixture, k: u32) -> Result<()> {
    if mixture.dimension() != index.topic_count {
        return Err(Error::InvalidInput(format!(
            "mixture has {} topics, index has {}",
            mixture.dimension(),
            index.topic_count
        )));
    }
    if k == 0 || k > index.k {
        return Err(Error::InvalidInput(format!(
            "k={k} outside [1,{}] covered by the index",
            index.k
        )));
    }
    Ok(())
}

/// The (topic, round-down landmark) pairs for the positive weights, plus the
/// fallback entry when every one of them rounds to zero: the largest-weight
/// topic at its round-up landmark.
fn rounded_entries<'a>(
    index: &'a LandmarkIndex,
    mixture: &TopicMixture,
) -> Result<(Vec<f64>, Vec<&'a IndexEntry>, bool)> {
    let mut rounded = Vec::with_capacity(mixture.dimension());
    for &w in mixture.weights() {
        rounded.push(round_down(w, &index.landmarks)?);
    }
    let positive: Vec<usize> = mixture.positive_topics().collect();
    debug_assert!(!positive.is_empty(), "mixture weights sum to 1");

    if positive.iter().any(|&i| rounded[i] > 0.0) {
        let entries = positive
            .iter()
            .map(|&i| index.entry_at(i, rounded[i]).expect("rounded onto the set"))
            .collect();
        return Ok((rounded, entries, false));
    }

    // Degenerate: every positive weight lies below the first positive
    // landmark. Answer from the strongest topic evaluated at its round-up
    // landmark so the result stays meaningful.
    let &best = positive
        .iter()
        .max_by(|&&a, &&b| {
            mixture
                .weight(a)
                .total_cmp(&mixture.weight(b))
                .then(b.cmp(&a))
        })
        .expect("at least one positive topic");
    let up = round_up(mixture.weight(best), &index.landmarks)?;
    let entry = index.entry_at(best, up).expect("rounded onto the set");
    Ok((rounded, vec![entry], true))
}

/// Best Topic Selection: return the stored seed set of the constituent topic
/// whose round-down entry has the largest stored spread. Ties break to the
/// lowest topic index. Performs no simulation.
pub fn bts_query(index: &LandmarkIndex, mixture: &TopicMixture, k: u32) -> Result<QueryResult> {
    check_query(index, mixture, k)?;
    let started = Instant::now();

    let (rounded, entries, fallback_used) = rounded_entries(index, mixture)?;
    let chosen = entries
        .iter()
        .max_by(|a, b| {
            a.spread
                .total_cmp(&b.spread)
                .then_with(|| b.topic.cmp(&a.topic))
        })
        .expect("positive topics exist");
    let seeds: Vec<NodeId> = chosen
        .result
        .records
        .iter()
        .take(k as usize)
        .map(|r| r.node)
        .collect();
    let shortfall = seeds.len() < k as usize;

    Ok(QueryResult {
        algorithm: QueryAlgorithm::Bts,
        rounded_mixture: rounded,
        chosen_topic: Some(chosen.topic),
        scores: None,
        shortfall,
        fallback_used,
        latency: started.elapsed(),
        seeds,
    })
}

/// Marginal Influence Sort: union the stored seed sets of the positive
/// round-down topics, score each node by the sum of its stored marginal
/// influences across those entries, and return the k best. Ties break to the
/// lowest node id. Performs no simulation.
pub fn mis_query(index: &LandmarkIndex, mixture: &TopicMixture, k: u32) -> Result<QueryResult> {
    check_query(index, mixture, k)?;
    let started = Instant::now();

    let (rounded, entries, fallback_used) = rounded_entries(index, mixture)?;
    let mut scored: Vec<(NodeId, f64)> = Vec::new();
    for entry in &entries {
        for rec in entry.result.records.iter().take(k as usize) {
            match scored.iter_mut().find(|(n, _)| *n == rec.node) {
                Some((_, f)) => *f += rec.marginal_influence,
                None => scored.push((rec.node, rec.marginal_influence)),
            }
        }
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(k as usize);
    let shortfall = scored.len() < k as usize;

    Ok(QueryResult {
        algorithm: QueryAlgorithm::Mis,
        rounded_mixture: rounded,
        chosen_topic: None,
        shortfall,
        fallback_used,
        latency: started.elapsed(),
        seeds: scored.iter().map(|(n, _)| *n).collect(),
        scores: Some(scored.iter().map(|(_, f)| *f).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::{self, OracleConfig};
    use crate::preprocess::{build_index, GreedySelector};
    use crate::selection::{GreedyResult, SeedRecord};
    use crate::TopicGraph;
    use proptest::prelude::*;

    fn entry(topic: usize, landmark: f64, seeds: &[(u32, f64)]) -> IndexEntry {
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
                probability_id: format!("topic={topic} landmark={landmark}"),
                oracle: OracleConfig::Exact,
            },
        }
    }

    /// Handcrafted two-topic index over Λ = {0, 0.5, 1}.
    fn small_index(
        at_half: [&[(u32, f64)]; 2],
        at_one: [&[(u32, f64)]; 2],
        k: u32,
    ) -> LandmarkIndex {
        let landmarks = LandmarkSet::new(vec![0.0, 0.5, 1.0]).unwrap();
        let zero: Vec<(u32, f64)> = (0..k).map(|i| (i, 1.0)).collect();
        let entries = vec![
            entry(0, 0.0, &zero),
            entry(0, 0.5, at_half[0]),
            entry(0, 1.0, at_one[0]),
            entry(1, 0.0, &zero),
            entry(1, 0.5, at_half[1]),
            entry(1, 1.0, at_one[1]),
        ];
        LandmarkIndex::from_parts(
            "fp".into(),
            k,
            2,
            landmarks,
            "greedy".into(),
            OracleConfig::Exact,
            entries,
        )
        .unwrap()
    }

    #[test]
    fn rounding_examples() {
        let landmarks = LandmarkSet::uniform(11).unwrap();
        assert!((round_down(0.35, &landmarks).unwrap() - 0.3).abs() < 1e-15);
        assert!((round_up(0.35, &landmarks).unwrap() - 0.4).abs() < 1e-15);
        let exact = landmarks.values()[3];
        assert_eq!(round_down(exact, &landmarks).unwrap(), exact);
        assert_eq!(round_up(exact, &landmarks).unwrap(), exact);
        assert_eq!(round_down(0.0, &landmarks).unwrap(), 0.0);
        assert_eq!(round_up(0.0, &landmarks).unwrap(), 0.0);
        assert_eq!(round_down(1.0, &landmarks).unwrap(), 1.0);
        assert_eq!(round_up(1.0, &landmarks).unwrap(), 1.0);
        assert!(round_down(-0.1, &landmarks).is_err());
        assert!(round_up(1.1, &landmarks).is_err());
    }

    #[test]
    fn bts_one_hot_uses_full_strength_entry() {
        let index = small_index(
            [&[(0, 2.0), (1, 1.5)], &[(5, 2.5), (6, 1.0)]],
            [&[(0, 3.0), (1, 2.0)], &[(5, 4.0), (6, 2.0)]],
            2,
        );
        let m = TopicMixture::one_hot(2, 0).unwrap();
        let r = bts_query(&index, &m, 2).unwrap();
        assert_eq!(r.chosen_topic, Some(0));
        assert_eq!(r.seeds, vec![0, 1]);
        assert!(!r.fallback_used);
    }

    #[test]
    fn bts_argmax_over_round_down_spreads() {
        // λ = (0.55, 0.45) rounds to (0.5, 0); topic 0 wins on stored spread.
        let index = small_index(
            [&[(0, 6.0), (1, 4.0)], &[(5, 4.0), (6, 3.0)]],
            [&[(0, 8.0), (1, 5.0)], &[(5, 6.0), (6, 4.0)]],
            2,
        );
        let m = TopicMixture::new(vec![0.55, 0.45]).unwrap();
        let r = bts_query(&index, &m, 2).unwrap();
        assert_eq!(r.chosen_topic, Some(0));
        assert_eq!(r.seeds, vec![0, 1]);
        assert!((r.rounded_mixture[0] - 0.5).abs() < 1e-15);
        assert_eq!(r.rounded_mixture[1], 0.0);
    }

    #[test]
    fn bts_tie_breaks_to_lowest_topic() {
        let index = small_index(
            [&[(0, 5.0), (1, 4.0)], &[(5, 5.0), (6, 4.0)]],
            [&[(0, 8.0)], &[(5, 8.0)]],
            2,
        );
        let m = TopicMixture::new(vec![0.5, 0.5]).unwrap();
        let r = bts_query(&index, &m, 2).unwrap();
        assert_eq!(r.chosen_topic, Some(0));
    }

    #[test]
    fn mis_sums_marginal_influence_across_topics() {
        let index = small_index(
            [&[(10, 3.0), (11, 1.0)], &[(10, 2.0), (12, 1.5)]],
            [&[(10, 4.0)], &[(12, 4.0)]],
            2,
        );
        let m = TopicMixture::new(vec![0.5, 0.5]).unwrap();
        let r = mis_query(&index, &m, 2).unwrap();
        // f(10)=5.0, f(12)=1.5, f(11)=1.0.
        assert_eq!(r.seeds, vec![10, 12]);
        assert_eq!(r.scores.as_ref().unwrap(), &vec![5.0, 1.5]);
        assert!(!r.shortfall);
    }

    #[test]
    fn mis_one_hot_returns_stored_order() {
        let index = small_index(
            [&[(10, 3.0), (11, 1.0)], &[(12, 2.0), (13, 1.5)]],
            [&[(10, 4.0), (11, 2.0)], &[(12, 5.0), (13, 2.5)]],
            2,
        );
        let m = TopicMixture::one_hot(2, 1).unwrap();
        let r = mis_query(&index, &m, 2).unwrap();
        assert_eq!(r.seeds, vec![12, 13]);
        let scores = r.scores.unwrap();
        assert!(scores.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn mis_flags_shortfall_instead_of_padding() {
        let index = small_index(
            [&[(10, 3.0)], &[(10, 2.0)]],
            [&[(10, 4.0)], &[(10, 5.0)]],
            2,
        );
        let m = TopicMixture::new(vec![0.5, 0.5]).unwrap();
        let r = mis_query(&index, &m, 2).unwrap();
        assert_eq!(r.seeds, vec![10]);
        assert!(r.shortfall);
    }

    #[test]
    fn all_zero_rounding_falls_back_to_strongest_topic_round_up() {
        let index = small_index(
            [&[(10, 3.0), (11, 1.0)], &[(12, 2.0), (13, 1.5)]],
            [&[(10, 4.0)], &[(12, 5.0)]],
            2,
        );
        // A weight at or above a positive landmark keeps the normal path.
        let mixture = TopicMixture::new(vec![0.49, 0.51]).unwrap();
        let r = bts_query(&index, &mixture, 2).unwrap();
        assert!(!r.fallback_used);

        // Three topics with every weight below the first positive landmark
        // force the degenerate path.
        let landmarks = LandmarkSet::new(vec![0.0, 0.5, 1.0]).unwrap();
        let zero: Vec<(u32, f64)> = vec![(0, 1.0), (1, 1.0)];
        let entries = vec![
            entry(0, 0.0, &zero),
            entry(0, 0.5, &[(10, 3.0), (11, 1.0)]),
            entry(0, 1.0, &[(10, 4.0)]),
            entry(1, 0.0, &zero),
            entry(1, 0.5, &[(12, 2.0), (13, 1.5)]),
            entry(1, 1.0, &[(12, 5.0)]),
            entry(2, 0.0, &zero),
            entry(2, 0.5, &[(14, 2.0)]),
            entry(2, 1.0, &[(14, 6.0)]),
        ];
        let index3 = LandmarkIndex::from_parts(
            "fp".into(),
            2,
            3,
            landmarks,
            "greedy".into(),
            OracleConfig::Exact,
            entries,
        )
        .unwrap();
        let tiny = TopicMixture::new(vec![0.4, 0.35, 0.25]).unwrap();
        let r = bts_query(&index3, &tiny, 2).unwrap();
        assert!(r.fallback_used);
        // Strongest topic is 0; its round-up landmark is 0.5.
        assert_eq!(r.chosen_topic, Some(0));
        assert_eq!(r.seeds, vec![10, 11]);

        let r = mis_query(&index3, &tiny, 2).unwrap();
        assert!(r.fallback_used);
        assert_eq!(r.seeds, vec![10, 11]);
    }

    #[test]
    fn queries_run_zero_diffusion_oracle_calls() {
        let index = small_index(
            [&[(10, 3.0), (11, 1.0)], &[(10, 2.0), (12, 1.5)]],
            [&[(10, 4.0)], &[(12, 4.0)]],
            2,
        );
        let m = TopicMixture::new(vec![0.5, 0.5]).unwrap();
        let before = diffusion::oracle_calls();
        bts_query(&index, &m, 2).unwrap();
        mis_query(&index, &m, 2).unwrap();
        assert_eq!(diffusion::oracle_calls(), before);
    }

    #[test]
    fn mis_equals_greedy_on_separable_landmark_mixture() {
        // Two disconnected components, one per topic: three one-edge stars
        // each, so every greedy pick is strictly productive and the stored
        // seed sets stay disjoint.
        let g = TopicGraph::from_entries(
            12,
            2,
            vec![
                (0, 1, 0, 0.8),
                (2, 3, 0, 0.6),
                (4, 5, 0, 0.4),
                (6, 7, 1, 0.9),
                (8, 9, 1, 0.7),
                (10, 11, 1, 0.3),
            ],
        )
        .unwrap();
        let landmarks = LandmarkSet::uniform(11).unwrap();
        let index =
            build_index(&g, 3, &landmarks, &GreedySelector, OracleConfig::Exact, None).unwrap();
        let mixture = TopicMixture::new(vec![0.5, 0.5]).unwrap();
        let mixed = g.mix_probabilities(&mixture).unwrap();

        let mis = mis_query(&index, &mixture, 3).unwrap();
        let greedy =
            crate::selection::greedy_select(&g, &mixed, 3, OracleConfig::Exact, "mixed").unwrap();

        let mis_spread = diffusion::exact_spread(&g, &mixed, &mis.seeds).unwrap();
        let greedy_spread = diffusion::exact_spread(&g, &mixed, &greedy.seeds()).unwrap();
        assert!(
            (mis_spread - greedy_spread).abs() < 1e-9,
            "mis {mis_spread} vs greedy {greedy_spread}"
        );
    }

    proptest! {
        // round_down(λ) ≤ λ ≤ round_up(λ), both landmarks, equal iff λ ∈ Λ.
        #[test]
        fn rounding_sandwich(lambda in 0.0f64..=1.0) {
            let landmarks = LandmarkSet::uniform(11).unwrap();
            let down = round_down(lambda, &landmarks).unwrap();
            let up = round_up(lambda, &landmarks).unwrap();
            prop_assert!(down <= lambda && lambda <= up);
            prop_assert!(landmarks.position(down).is_some());
            prop_assert!(landmarks.position(up).is_some());
            let on_landmark = landmarks.position(lambda).is_some();
            prop_assert_eq!(down == up, on_landmark);
        }
    }
}
