use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what}: series did not converge within {max_terms} terms")]
    NonConvergence { what: &'static str, max_terms: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not positive definite (pivot {pivot} is {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("numerical breakdown: {context} produced {value:e}")]
    NumericalBreakdown { context: String, value: f64 },

    #[error("could not bracket the threshold for pfa = {alpha}")]
    BracketFailure { alpha: f64 },

    #[error("subcritical regime: gamma_bar = {gamma_bar} does not exceed the phase transition {gamma_p}")]
    SubcriticalRequest { gamma_bar: f64, gamma_p: f64 },

    #[error("closed-form ROC requires n = m (got m = {m}, n = {n})")]
    ClosedFormUnavailable { m: usize, n: usize },

    #[error("malformed table: {0}")]
    TableFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
