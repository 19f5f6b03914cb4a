use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty data: at least one recorded click is required")]
    EmptyData,

    /// The POM outcomes are multiples of the identity; no dual frame exists.
    #[error("degenerate frame: w*K - 1 = {0:e} is not positive")]
    DegenerateFrame(f64),

    #[error("POM is not informationally complete: K = {k} outcomes, need {needed}")]
    NotInformationallyComplete { k: usize, needed: usize },

    #[error("enumeration too large: {cardinality} count vectors for N = {n}, K = {k} (limit {limit})")]
    TooLarge {
        n: u64,
        k: usize,
        cardinality: u128,
        limit: u128,
    },

    /// Every Monte Carlo sample was rejected by the physicality indicator.
    #[error("degenerate posterior: acceptance rate {acceptance} over {samples} samples")]
    DegeneratePosterior { samples: usize, acceptance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
