use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A denominator of the form `1 - c q^k` vanished (or came within rounding of it).
    #[error("degenerate denominator in {context} (factor {factor:e})")]
    DegenerateDenominator { context: &'static str, factor: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A value that must be real came out with a non-negligible imaginary part.
    #[error("non-real result in {context} (imaginary part {imag:e})")]
    NonReal { context: &'static str, imag: f64 },

    #[error("series {context} did not converge within {terms} terms")]
    NonConvergence { context: &'static str, terms: usize },

    #[error("quadrature did not reach tolerance {tol:e} after {splits} splits (estimate {err_est:e})")]
    Quadrature { tol: f64, splits: usize, err_est: f64 },

    /// Cancellation in a series leaves fewer correct digits than a check needs.
    #[error("ill-conditioned {context}: terms reach {condition:e} times the sum")]
    IllConditioned { context: &'static str, condition: f64 },

    #[error("non-positive factor {value:e} in {context}")]
    NonPositiveFactor { context: &'static str, value: f64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-monotone CDF at grid index {index}")]
    NonMonotoneCdf { index: usize },

    #[error("insufficient bin occupancy: {count} samples in bin {bin}, need {needed}")]
    InsufficientBins { bin: usize, count: usize, needed: usize },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
