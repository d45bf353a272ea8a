//! Topic-aware influence maximization with a preprocessing stage.
//!
//! The library models directed social graphs whose edges carry per-topic
//! influence probabilities, estimates influence spread under the independent
//! cascade process, selects seed sets greedily with lazy evaluation, and
//! precomputes per-topic landmark indexes so topic-mixture queries can be
//! answered in microseconds by table lookup and sorting instead of fresh
//! simulation.

pub mod analysis;
pub mod diffusion;
pub mod error;
pub mod evaluate;
pub mod graph;
pub mod preprocess;
pub mod query;
pub mod selection;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{EdgeProbs, NodeId, TopicGraph, TopicMixture};

/// Caps process-wide parallelism at `workers` threads. Call once, before any
/// parallel stage runs; later calls fail once the pool exists.
pub fn configure_global_workers(workers: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| Error::InvalidInput(format!("cannot configure {workers} workers: {e}")))
}
