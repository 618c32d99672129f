use std::path::PathBuf;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("node {0} has zero degree and no self-loop")]
    ZeroDegreeNode(usize),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("node kernel expects {0} but the node set representation lacks it")]
    MissingAttribute(&'static str),

    #[error("symbol {0} is not in the label alphabet (size {1})")]
    UnknownSymbol(usize, usize),

    #[error("eigendecomposition failed: {0}")]
    EigenFailure(String),

    #[error("median pairwise distance is zero; the feature is constant")]
    DegenerateDistances,

    #[error("mmd radicand {0:e} is negative beyond roundoff tolerance")]
    NegativeRadicand(f64),

    #[error("tensor embedding dimension {0} exceeds the cap of {1}; reduce d0/dc or the label alphabet")]
    EmbeddingTooLarge(usize, usize),

    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),

    #[error("{file}:{line}: malformed line: {reason}")]
    MalformedLine {
        file: String,
        line: usize,
        reason: String,
    },

    #[error("graph indicator inconsistent: {0}")]
    InconsistentIndicator(String),

    #[error("ragged attributes: line {line} has dimension {got}, expected {expected}")]
    RaggedAttributes {
        line: usize,
        got: usize,
        expected: usize,
    },

    #[error("svm solver did not converge within {0} iterations")]
    NotConverged(usize),

    #[error("class {class} has {count} members, fewer than {folds} folds")]
    FoldTooSmall {
        class: i64,
        count: usize,
        folds: usize,
    },

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
