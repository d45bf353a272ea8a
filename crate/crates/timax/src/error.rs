//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Every mixture weight fell below the elimination floor.
    #[error("degenerate mixture: all weights below floor {floor}")]
    DegenerateMixture { floor: f64 },

    /// Too many edges with probability strictly inside (0,1) for exact
    /// enumeration.
    #[error("enumeration bound exceeded: {free} free edges, limit {limit}")]
    EnumerationBound { free: usize, limit: usize },

    /// A text file did not match the expected format.
    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },

    /// An index was built against a different graph.
    #[error("stale index: index fingerprint {index} does not match graph fingerprint {graph}")]
    StaleIndex { index: String, graph: String },

    /// A topic has probabilities above the cutoff but no values below it to
    /// resample from.
    #[error("cannot smooth topic {topic}: no probabilities below cutoff {cutoff}")]
    CannotSmooth { topic: usize, cutoff: f64 },

    /// Selector failure while building one index entry.
    #[error("index entry (topic {topic}, landmark {landmark}) failed: {source}")]
    EntryFailed {
        topic: usize,
        landmark: f64,
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
