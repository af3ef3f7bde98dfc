use std::path::PathBuf;

use crate::solution::lp::LpError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("point {index} has a non-finite coordinate")]
    NonFinitePoint { index: usize },

    #[error("degenerate dataset: all points coincide, similarity is undefined")]
    DegenerateDataset,

    #[error("unknown generator shape `{0}` (expected blobs, bridge, mixed_density or uniform)")]
    UnknownShape(String),

    #[error("player index {index} out of range for {n} players")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("dimension mismatch: expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} requires {min} <= n <= {max}, got n = {n}")]
    PlayerCount {
        what: &'static str,
        n: usize,
        min: usize,
        max: usize,
    },

    #[error("degenerate game: {0}")]
    DegenerateGame(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid similarity matrix: {0}")]
    InvalidSimilarity(String),

    #[error(transparent)]
    Lp(#[from] LpError),

    #[error("nucleolus did not converge: {0}")]
    Nucleolus(String),

    #[error("labels document: {0}")]
    Labels(#[from] serde_json::Error),
}
