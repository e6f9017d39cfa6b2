use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is singular or nearly singular")]
    Singular,

    #[error("operator is rank deficient (column rank below {expected})")]
    RankDeficient { expected: usize },

    #[error("no solution within the search budget (k_max = {k_max})")]
    NoSolution { k_max: usize },

    #[error("instance too large for exhaustive search (n = {n}, k_max = {k_max})")]
    TooLarge { n: usize, k_max: usize },

    #[error("quantity undefined: {0}")]
    Undefined(&'static str),

    #[error("numerical breakdown in {0}")]
    NumericalBreakdown(&'static str),

    #[error("inner solve failed at reweight iteration {iteration}: {source}")]
    Inner {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("bad file format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
