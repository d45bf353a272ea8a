//! Evaluation sweeps: run a set of algorithms over sampled topic mixtures,
//! measure spread at every seed-count prefix with one shared Monte Carlo
//! coin stream so comparisons are paired, and record per-query online
//! latency.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::analysis::MixtureSampler;
use crate::diffusion::{self, OracleConfig};
use crate::error::{Error, Result};
use crate::graph::{NodeId, TopicGraph, TopicMixture};
use crate::preprocess::LandmarkIndex;
use crate::query;
use crate::selection;

/// Algorithms the evaluation harness can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Mis,
    Bts,
    TaGreedy,
    ToGreedy,
    TaPageRank,
    TaWeightedDegree,
    ToDegree,
    Random,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Mis,
        Algorithm::Bts,
        Algorithm::TaGreedy,
        Algorithm::ToGreedy,
        Algorithm::TaPageRank,
        Algorithm::TaWeightedDegree,
        Algorithm::ToDegree,
        Algorithm::Random,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Mis => "mis",
            Algorithm::Bts => "bts",
            Algorithm::TaGreedy => "ta-greedy",
            Algorithm::ToGreedy => "to-greedy",
            Algorithm::TaPageRank => "ta-pagerank",
            Algorithm::TaWeightedDegree => "ta-weighted-degree",
            Algorithm::ToDegree => "to-degree",
            Algorithm::Random => "random",
        }
    }

    fn needs_index(&self) -> bool {
        matches!(self, Algorithm::Mis | Algorithm::Bts)
    }

    /// Topic-oblivious algorithms select one seed set regardless of the
    /// query mixture.
    fn mixture_independent(&self) -> bool {
        matches!(
            self,
            Algorithm::ToGreedy | Algorithm::ToDegree | Algorithm::Random
        )
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .iter()
            .find(|a| a.name() == s || a.name().replace('-', "_") == s)
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("unknown algorithm {s:?}")))
    }
}

/// How evaluation mixtures are sampled.
#[derive(Clone, Debug)]
pub struct MixtureSpec {
    pub sampler: MixtureSampler,
    pub count: usize,
}

/// One evaluation sweep, file edition: paths in, CSV files out.
#[derive(Clone, Debug)]
pub struct EvalConfig {
    pub graph: PathBuf,
    pub index: Option<PathBuf>,
    pub algorithms: Vec<Algorithm>,
    pub k: u32,
    pub mixtures: MixtureSpec,
    /// Monte Carlo runs for both selection oracles and spread measurement.
    pub runs: u32,
    pub seed: u64,
    pub output_dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpreadRow {
    pub algorithm: Algorithm,
    pub k: u32,
    /// Mean over mixtures of the measured spread of the first k seeds.
    pub mean_spread: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimingRow {
    pub algorithm: Algorithm,
    pub queries: usize,
    pub median_us: f64,
    pub p99_us: f64,
}

#[derive(Clone, Debug)]
pub struct EvalReport {
    pub spread_rows: Vec<SpreadRow>,
    pub timing_rows: Vec<TimingRow>,
}

/// In-memory evaluation over already-loaded inputs.
///
/// Spread is measured with `simulate_spread` on the mixed probability
/// function at each prefix 1..k, under one master seed shared by every
/// algorithm, mixture, and prefix, so all comparisons run on the same
/// live-edge draws.
pub fn evaluate(
    graph: &TopicGraph,
    index: Option<&LandmarkIndex>,
    algorithms: &[Algorithm],
    k: u32,
    mixtures: &[TopicMixture],
    runs: u32,
    seed: u64,
) -> Result<EvalReport> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if runs == 0 {
        return Err(Error::InvalidInput("runs must be at least 1".into()));
    }
    if mixtures.is_empty() {
        return Err(Error::InvalidInput("no mixtures to evaluate".into()));
    }
    if algorithms.iter().any(Algorithm::needs_index) {
        let index = index.ok_or_else(|| {
            Error::InvalidInput("mis/bts evaluation requires a prebuilt index".into())
        })?;
        index.check_fingerprint(&graph.fingerprint())?;
    }

    let select_oracle = OracleConfig::MonteCarlo {
        runs,
        seed: diffusion::derive_seed(seed, 1),
    };
    let eval_seed = diffusion::derive_seed(seed, 2);
    let random_seed = diffusion::derive_seed(seed, 3);

    let mut spread_rows = Vec::new();
    let mut timing_rows = Vec::new();
    for &alg in algorithms {
        let mut latencies: Vec<Duration> = Vec::new();
        // spread_acc[j-1] accumulates the measured spread of the first j
        // seeds across mixtures.
        let mut spread_acc = vec![0.0f64; k as usize];

        let fixed = if alg.mixture_independent() {
            let started = Instant::now();
            let seeds = select_fixed(graph, alg, k, select_oracle, random_seed)?;
            latencies.push(started.elapsed());
            Some(seeds)
        } else {
            None
        };

        for mixture in mixtures {
            let seeds = match &fixed {
                Some(seeds) => seeds.clone(),
                None => {
                    let (seeds, latency) =
                        select_per_mixture(graph, index, alg, k, mixture, select_oracle)?;
                    latencies.push(latency);
                    seeds
                }
            };
            let mixed = graph.mix_probabilities(mixture)?;
            for j in 1..=k as usize {
                // A short seed list (MIS shortfall) repeats its full spread
                // for the remaining budgets.
                let prefix = &seeds[..j.min(seeds.len())];
                let est = diffusion::simulate_spread(graph, &mixed, prefix, runs, eval_seed)?;
                spread_acc[j - 1] += est.mean;
            }
        }

        for j in 1..=k {
            spread_rows.push(SpreadRow {
                algorithm: alg,
                k: j,
                mean_spread: spread_acc[j as usize - 1] / mixtures.len() as f64,
            });
        }
        timing_rows.push(timing_row(alg, &latencies));
    }
    Ok(EvalReport {
        spread_rows,
        timing_rows,
    })
}

fn select_fixed(
    graph: &TopicGraph,
    alg: Algorithm,
    k: u32,
    oracle: OracleConfig,
    random_seed: u64,
) -> Result<Vec<NodeId>> {
    match alg {
        Algorithm::ToGreedy => Ok(selection::to_greedy(graph, k, oracle)?.seeds()),
        Algorithm::ToDegree => Ok(selection::top_degree_seeds(graph, k)),
        Algorithm::Random => Ok(selection::random_seeds(graph, k, random_seed)),
        _ => unreachable!("not mixture independent"),
    }
}

fn select_per_mixture(
    graph: &TopicGraph,
    index: Option<&LandmarkIndex>,
    alg: Algorithm,
    k: u32,
    mixture: &TopicMixture,
    oracle: OracleConfig,
) -> Result<(Vec<NodeId>, Duration)> {
    match alg {
        Algorithm::Mis => {
            let r = query::mis_query(index.expect("checked"), mixture, k)?;
            Ok((r.seeds, r.latency))
        }
        Algorithm::Bts => {
            let r = query::bts_query(index.expect("checked"), mixture, k)?;
            Ok((r.seeds, r.latency))
        }
        Algorithm::TaGreedy => {
            let started = Instant::now();
            let mixed = graph.mix_probabilities(mixture)?;
            let seeds = selection::greedy_select(graph, &mixed, k, oracle, "mixture")?.seeds();
            Ok((seeds, started.elapsed()))
        }
        Algorithm::TaPageRank => {
            let started = Instant::now();
            let mixed = graph.mix_probabilities(mixture)?;
            let seeds = selection::pagerank_seeds(graph, &mixed, k);
            Ok((seeds, started.elapsed()))
        }
        Algorithm::TaWeightedDegree => {
            let started = Instant::now();
            let mixed = graph.mix_probabilities(mixture)?;
            let seeds = selection::weighted_degree_seeds(graph, &mixed, k);
            Ok((seeds, started.elapsed()))
        }
        _ => unreachable!("mixture independent"),
    }
}

fn timing_row(alg: Algorithm, latencies: &[Duration]) -> TimingRow {
    let mut micros: Vec<f64> = latencies
        .iter()
        .map(|d| d.as_secs_f64() * 1e6)
        .collect();
    micros.sort_by(|a, b| a.total_cmp(b));
    TimingRow {
        algorithm: alg,
        queries: micros.len(),
        median_us: nearest_rank(&micros, 0.5),
        p99_us: nearest_rank(&micros, 0.99),
    }
}

fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let idx = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

/// File-driven evaluation: loads the graph (and index when needed), samples
/// mixtures, runs [`evaluate`], and writes `spread.csv` and `timing.csv`
/// into the output directory.
pub fn run_evaluate(cfg: &EvalConfig) -> Result<EvalReport> {
    let graph = TopicGraph::from_path(&cfg.graph)?;
    let index = match &cfg.index {
        Some(path) => Some(LandmarkIndex::load(path)?),
        None => None,
    };
    let mixtures = crate::analysis::sample_mixtures(
        &cfg.mixtures.sampler,
        cfg.mixtures.count,
        graph.topic_count() as usize,
        diffusion::derive_seed(cfg.seed, 0),
    )?;
    let report = evaluate(
        &graph,
        index.as_ref(),
        &cfg.algorithms,
        cfg.k,
        &mixtures,
        cfg.runs,
        cfg.seed,
    )?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    write_spread_csv(&cfg.output_dir.join("spread.csv"), &report.spread_rows)?;
    write_timing_csv(&cfg.output_dir.join("timing.csv"), &report.timing_rows)?;
    Ok(report)
}

pub fn write_spread_csv(path: &Path, rows: &[SpreadRow]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "algorithm,k,mean_spread")?;
    for row in rows {
        writeln!(f, "{},{},{}", row.algorithm, row.k, row.mean_spread)?;
    }
    Ok(())
}

pub fn write_timing_csv(path: &Path, rows: &[TimingRow]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "algorithm,queries,median_us,p99_us")?;
    for row in rows {
        writeln!(
            f,
            "{},{},{},{}",
            row.algorithm, row.queries, row.median_us, row.p99_us
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::{build_index, GreedySelector, LandmarkSet};
    use crate::synth::{generate_graph, ProbabilityModel, SynthConfig};

    fn small_setup() -> (TopicGraph, LandmarkIndex) {
        let graph = generate_graph(&SynthConfig {
            nodes: 30,
            edges: 60,
            topics: 2,
            model: ProbabilityModel::RandomUniform,
            overlap: 0.4,
            seed: 8,
        })
        .unwrap();
        let landmarks = LandmarkSet::new(vec![0.0, 0.5, 1.0]).unwrap();
        let index = build_index(
            &graph,
            3,
            &landmarks,
            &GreedySelector,
            OracleConfig::MonteCarlo { runs: 200, seed: 1 },
            None,
        )
        .unwrap();
        (graph, index)
    }

    #[test]
    fn spread_rows_cover_every_algorithm_and_prefix() {
        let (graph, index) = small_setup();
        let mixtures =
            crate::analysis::sample_mixtures(&MixtureSampler::UniformPairs, 4, 2, 5).unwrap();
        let algorithms = [
            Algorithm::Mis,
            Algorithm::Bts,
            Algorithm::TaWeightedDegree,
            Algorithm::Random,
        ];
        let report =
            evaluate(&graph, Some(&index), &algorithms, 3, &mixtures, 100, 9).unwrap();
        assert_eq!(report.spread_rows.len(), algorithms.len() * 3);
        assert_eq!(report.timing_rows.len(), algorithms.len());
        // Spread grows (weakly) with the seed budget for a fixed algorithm.
        for alg in algorithms {
            let series: Vec<f64> = report
                .spread_rows
                .iter()
                .filter(|r| r.algorithm == alg)
                .map(|r| r.mean_spread)
                .collect();
            assert_eq!(series.len(), 3);
            assert!(series.windows(2).all(|w| w[1] >= w[0] - 1e-9));
        }
    }

    #[test]
    fn preprocessed_queries_perform_no_greedy_calls() {
        let (graph, index) = small_setup();
        let mixtures =
            crate::analysis::sample_mixtures(&MixtureSampler::UniformPairs, 3, 2, 6).unwrap();
        let before = selection::greedy_calls();
        evaluate(
            &graph,
            Some(&index),
            &[Algorithm::Mis, Algorithm::Bts],
            3,
            &mixtures,
            50,
            4,
        )
        .unwrap();
        assert_eq!(selection::greedy_calls(), before);
    }

    #[test]
    fn evaluation_is_deterministic_given_seed() {
        let (graph, index) = small_setup();
        let mixtures =
            crate::analysis::sample_mixtures(&MixtureSampler::UniformPairs, 3, 2, 6).unwrap();
        let a = evaluate(&graph, Some(&index), &[Algorithm::Mis], 3, &mixtures, 80, 4).unwrap();
        let b = evaluate(&graph, Some(&index), &[Algorithm::Mis], 3, &mixtures, 80, 4).unwrap();
        assert_eq!(a.spread_rows, b.spread_rows);
    }

    #[test]
    fn stale_index_is_rejected() {
        let (_, index) = small_setup();
        let other = generate_graph(&SynthConfig {
            nodes: 30,
            edges: 50,
            topics: 2,
            model: ProbabilityModel::RandomUniform,
            overlap: 0.4,
            seed: 99,
        })
        .unwrap();
        let mixtures =
            crate::analysis::sample_mixtures(&MixtureSampler::UniformPairs, 2, 2, 6).unwrap();
        assert!(matches!(
            evaluate(&other, Some(&index), &[Algorithm::Mis], 3, &mixtures, 50, 4),
            Err(Error::StaleIndex { .. })
        ));
    }

    #[test]
    fn algorithm_names_round_trip() {
        for alg in Algorithm::ALL {
            assert_eq!(alg.name().parse::<Algorithm>().unwrap(), alg);
        }
        assert!("pmia".parse::<Algorithm>().is_err());
        assert_eq!("ta_greedy".parse::<Algorithm>().unwrap(), Algorithm::TaGreedy);
    }
}
