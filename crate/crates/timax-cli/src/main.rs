//! Command-line front end: graph generation, landmark preprocessing,
//! real-time queries, evaluation sweeps, and dataset analysis reports.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use timax::analysis::{self, MixtureSampler};
use timax::diffusion::OracleConfig;
use timax::evaluate::{self, Algorithm, EvalConfig, MixtureSpec};
use timax::preprocess::{build_index, GreedySelector, LandmarkIndex, LandmarkSet};
use timax::query::{self, QueryAlgorithm};
use timax::synth::{generate_graph, ProbabilityModel, SynthConfig};
use timax::{TopicGraph, TopicMixture};

#[derive(Parser)]
#[command(name = "timax", version, about = "Topic-aware influence maximization")]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic topic graph.
    GenGraph(GenGraphArgs),
    /// Build the landmark index for a graph.
    Preprocess(PreprocessArgs),
    /// Answer one topic-mixture query from a prebuilt index.
    Query(QueryArgs),
    /// Run algorithms over sampled mixtures; emit spread and timing CSVs.
    Evaluate(EvaluateArgs),
    /// Emit cross-topic overlap coefficient reports.
    Analyze(AnalyzeArgs),
    /// Emit per-topic probability statistics.
    Stats(StatsArgs),
}

#[derive(Args)]
struct GenGraphArgs {
    #[arg(long)]
    nodes: u32,
    /// Total (edge, topic) probability entries.
    #[arg(long)]
    edges: usize,
    #[arg(long)]
    topics: u32,
    /// trivalency | random-uniform
    #[arg(long, default_value = "trivalency", value_parser = parse_model)]
    model: ProbabilityModel,
    /// 0 = fully separable topics, 1 = fully shared.
    #[arg(long, default_value_t = 0.0)]
    overlap: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PreprocessArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    k: u32,
    /// Landmark count for uniform spacing, or an explicit comma list like
    /// "0,0.25,0.5,1".
    #[arg(long, default_value = "11")]
    landmarks: String,
    /// exact | mc
    #[arg(long, default_value = "mc")]
    oracle: String,
    /// Monte Carlo runs per spread estimate.
    #[arg(long, default_value_t = 10_000)]
    runs: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    index: PathBuf,
    /// mis | bts
    #[arg(long, value_parser = parse_query_algorithm)]
    algorithm: QueryAlgorithm,
    /// Comma-separated topic weights summing to 1, e.g. "0.6,0.4".
    #[arg(long)]
    mixture: String,
    /// Seed budget; defaults to the k the index was built for.
    #[arg(long)]
    k: Option<u32>,
    /// Verify the index against this graph before answering.
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    index: Option<PathBuf>,
    /// Comma-separated list from: mis,bts,ta-greedy,to-greedy,ta-pagerank,
    /// ta-weighted-degree,to-degree,random.
    #[arg(long, value_parser = parse_algorithms)]
    algorithms: AlgorithmList,
    #[arg(long)]
    k: u32,
    /// Number of sampled query mixtures.
    #[arg(long, default_value_t = 50)]
    mixtures: usize,
    /// uniform-pairs | dirichlet
    #[arg(long, default_value = "uniform-pairs")]
    sampler: String,
    /// Dirichlet concentration parameters (comma list, one per topic).
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    runs: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Comma-separated thresholds, e.g. "0,0.1,0.3".
    #[arg(long, default_value = "0")]
    theta: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone)]
struct AlgorithmList(Vec<Algorithm>);

fn parse_algorithms(s: &str) -> std::result::Result<AlgorithmList, String> {
    let algorithms = s
        .split(',')
        .map(|name| name.trim().parse::<Algorithm>())
        .collect::<timax::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    if algorithms.is_empty() {
        return Err("no algorithms given".into());
    }
    Ok(AlgorithmList(algorithms))
}

fn parse_model(s: &str) -> std::result::Result<ProbabilityModel, String> {
    s.parse().map_err(|e: timax::Error| e.to_string())
}

fn parse_query_algorithm(s: &str) -> std::result::Result<QueryAlgorithm, String> {
    match s {
        "mis" => Ok(QueryAlgorithm::Mis),
        "bts" => Ok(QueryAlgorithm::Bts),
        _ => Err(format!("unknown query algorithm {s:?} (expected mis or bts)")),
    }
}

fn parse_f64_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .with_context(|| format!("cannot parse {what} value {x:?}"))
        })
        .collect()
}

fn parse_landmarks(s: &str) -> Result<LandmarkSet> {
    let set = if s.contains(',') {
        LandmarkSet::new(parse_f64_list(s, "landmark")?)
    } else {
        let count: usize = s
            .parse()
            .with_context(|| format!("cannot parse landmark count {s:?}"))?;
        LandmarkSet::uniform(count)
    };
    Ok(set?)
}

fn main() {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        if let Err(e) = timax::configure_global_workers(workers) {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::GenGraph(args) => cmd_gen_graph(args),
        Command::Preprocess(args) => cmd_preprocess(args),
        Command::Query(args) => cmd_query(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Stats(args) => cmd_stats(args),
    }
}

fn cmd_gen_graph(args: GenGraphArgs) -> Result<()> {
    let graph = generate_graph(&SynthConfig {
        nodes: args.nodes,
        edges: args.edges,
        topics: args.topics,
        model: args.model,
        overlap: args.overlap,
        seed: args.seed,
    })?;
    graph
        .to_path(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "wrote {} ({} nodes, {} edges, {} topics, fingerprint {})",
        args.out.display(),
        graph.node_count(),
        graph.edge_count(),
        graph.topic_count(),
        graph.fingerprint()
    );
    Ok(())
}

fn cmd_preprocess(args: PreprocessArgs) -> Result<()> {
    let graph = TopicGraph::from_path(&args.graph)
        .with_context(|| format!("reading {}", args.graph.display()))?;
    let landmarks = parse_landmarks(&args.landmarks)?;
    let oracle = match args.oracle.as_str() {
        "exact" => OracleConfig::Exact,
        "mc" => OracleConfig::MonteCarlo {
            runs: args.runs,
            seed: args.seed,
        },
        other => bail!("unknown oracle {other:?} (expected exact or mc)"),
    };
    let started = std::time::Instant::now();
    let index = build_index(&graph, args.k, &landmarks, &GreedySelector, oracle, None)?;
    index
        .save(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "wrote {} ({} entries, mu_max {:.4}, {:.1}s)",
        args.out.display(),
        index.entries().len(),
        index.mu_max(),
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

fn cmd_query(args: QueryArgs) -> Result<()> {
    let index = LandmarkIndex::load(&args.index)
        .with_context(|| format!("reading {}", args.index.display()))?;
    if let Some(graph_path) = &args.graph {
        let graph = TopicGraph::from_path(graph_path)
            .with_context(|| format!("reading {}", graph_path.display()))?;
        index.check_fingerprint(&graph.fingerprint())?;
    }
    let mixture = TopicMixture::new(parse_f64_list(&args.mixture, "mixture")?)?;
    let k = args.k.unwrap_or(index.k);
    let result = match args.algorithm {
        QueryAlgorithm::Mis => query::mis_query(&index, &mixture, k)?,
        QueryAlgorithm::Bts => query::bts_query(&index, &mixture, k)?,
    };

    let seeds = result
        .seeds
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    println!("seeds {seeds}");
    if let Some(topic) = result.chosen_topic {
        println!("topic {topic}");
    }
    if let Some(scores) = &result.scores {
        let scores = scores
            .iter()
            .map(|f| f.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        println!("scores {scores}");
    }
    println!("latency_us {:.3}", result.latency.as_secs_f64() * 1e6);
    if result.shortfall {
        println!("shortfall true");
    }
    if result.fallback_used {
        println!("fallback true");
    }
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let sampler = match args.sampler.as_str() {
        "uniform-pairs" | "uniform_pairs" => MixtureSampler::UniformPairs,
        "dirichlet" => {
            let alpha = args
                .alpha
                .as_ref()
                .context("dirichlet sampling requires --alpha")?;
            MixtureSampler::Dirichlet {
                alpha: parse_f64_list(alpha, "alpha")?,
            }
        }
        other => bail!("unknown sampler {other:?} (expected uniform-pairs or dirichlet)"),
    };
    let report = evaluate::run_evaluate(&EvalConfig {
        graph: args.graph,
        index: args.index,
        algorithms: args.algorithms.0,
        k: args.k,
        mixtures: MixtureSpec {
            sampler,
            count: args.mixtures,
        },
        runs: args.runs,
        seed: args.seed,
        output_dir: args.out.clone(),
    })?;
    println!(
        "wrote {} and {} ({} spread rows)",
        args.out.join("spread.csv").display(),
        args.out.join("timing.csv").display(),
        report.spread_rows.len()
    );
    for row in &report.timing_rows {
        println!(
            "{}: median {:.2} us, p99 {:.2} us over {} queries",
            row.algorithm, row.median_us, row.p99_us, row.queries
        );
    }
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let graph = TopicGraph::from_path(&args.graph)
        .with_context(|| format!("reading {}", args.graph.display()))?;
    let thetas = parse_f64_list(&args.theta, "theta")?;
    std::fs::create_dir_all(&args.out)?;

    let mut summary = String::from("coefficient,theta,min,mean,max\n");
    for theta in thetas {
        let report = analysis::overlap_coefficients(&graph, theta)?;
        write_matrix_csv(
            &args.out.join(format!("overlap_edge_theta{theta}.csv")),
            &report.edge,
        )?;
        write_matrix_csv(
            &args.out.join(format!("overlap_node_theta{theta}.csv")),
            &report.node,
        )?;
        if let Some(s) = report.edge_summary {
            writeln!(summary, "edge,{theta},{},{},{}", s.min, s.mean, s.max)?;
        }
        if let Some(s) = report.node_summary {
            writeln!(summary, "node,{theta},{},{},{}", s.min, s.mean, s.max)?;
        }
    }
    let summary_path = args.out.join("overlap_summary.csv");
    std::fs::write(&summary_path, summary)?;
    println!("wrote overlap reports to {}", args.out.display());
    Ok(())
}

fn write_matrix_csv(path: &std::path::Path, matrix: &[Vec<Option<f64>>]) -> Result<()> {
    let mut out = String::from("topic");
    for j in 0..matrix.len() {
        write!(out, ",{j}")?;
    }
    out.push('\n');
    for (i, row) in matrix.iter().enumerate() {
        write!(out, "{i}")?;
        for cell in row {
            match cell {
                Some(v) => write!(out, ",{v}")?,
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> Result<()> {
    let graph = TopicGraph::from_path(&args.graph)
        .with_context(|| format!("reading {}", args.graph.display()))?;
    let mut out = String::from("topic,nonzero,mean,std_dev,p25,p50,p75\n");
    for (topic, row) in analysis::probability_stats(&graph).iter().enumerate() {
        match row {
            Some(s) => writeln!(
                out,
                "{topic},{},{},{},{},{},{}",
                s.nonzero, s.mean, s.std_dev, s.p25, s.p50, s.p75
            )?,
            None => writeln!(out, "{topic},0,,,,,")?,
        }
    }
    match &args.out {
        Some(path) => std::fs::write(path, out)?,
        None => std::io::stdout().write_all(out.as_bytes())?,
    }
    Ok(())
}
