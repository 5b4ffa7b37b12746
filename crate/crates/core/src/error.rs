use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A channel configuration or quadrature specification violates its invariants.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    Accuracy { estimate: f64, error_bound: f64 },

    /// The root finder was handed a bracket without a sign change.
    #[error("root not bracketed on [{lo}, {hi}]: g(lo) = {g_lo:e}, g(hi) = {g_hi:e}")]
    Bracket {
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },

    #[error("index out of range: {0}")]
    Index(String),

    /// A computed quantity contradicts a structural identity (negative variance and the like).
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("empty input")]
    EmptyInput,
}

impl Error {
    /// Short machine-readable tag, used by the CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::InvalidConfig(_) => "invalid_config",
            Error::Accuracy { .. } => "accuracy",
            Error::Bracket { .. } => "bracket",
            Error::Index(_) => "index",
            Error::Consistency(_) => "consistency",
            Error::EmptyInput => "empty_input",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
