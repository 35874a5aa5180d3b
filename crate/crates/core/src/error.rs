use alloc::string::String;

/// Errors raised anywhere in the numerical pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("chain length must be at least 1")]
    EmptyChain,
    #[error("chain length {n_sites} exceeds the configured cap of {cap} sites")]
    SiteCapExceeded { n_sites: usize, cap: usize },
    #[error("site {site} out of range for a chain of {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("parameter `{name}` must be finite, got {value}")]
    NonFiniteParameter { name: &'static str, value: f64 },
    #[error("matrix dimension {dimension} exceeds the cap {cap}")]
    DimensionCapExceeded { dimension: usize, cap: usize },
    #[error("matrix dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("dimension {dimension} is not the square of a sector dimension")]
    NotBipartite { dimension: usize },
    #[error("invalid sparse entry ({row}, {col}): {reason}")]
    InvalidEntry {
        row: usize,
        col: usize,
        reason: &'static str,
    },
    #[error("symmetric eigensolver did not converge (dimension {dimension}, max |entry| {max_abs})")]
    EigenNonConvergence { dimension: usize, max_abs: f64 },
    #[error("{check} check failed: {value:e} exceeds tolerance {tolerance:e}")]
    ValidationFailed {
        check: &'static str,
        value: f64,
        tolerance: f64,
    },
    #[error("temperature must be {expected}, got {value}")]
    InvalidTemperature { expected: &'static str, value: f64 },
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("extrapolation needs at least 2 distinct chain lengths, got {distinct}")]
    TooFewSizes { distinct: usize },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
