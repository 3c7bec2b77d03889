//! Error type shared across the crate.
//!
//! Every fallible operation returns `Result<T, SimilError>`. Variants are
//! coarse by design: callers branch on the kind, messages carry the details.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SimilError {
    /// Malformed textual input (rationals, files, labels).
    #[error("parse error: {0}")]
    Parse(String),

    /// A distribution, family, or game fails its construction invariants.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Two inputs that must agree (spaces, players, states, priors) do not.
    #[error("mismatched inputs: {0}")]
    Mismatch(String),

    /// Conditioning on a signal of probability zero.
    #[error("conditioning on zero-probability signal: {0}")]
    ZeroMarginal(String),

    /// A witness was requested but the order holds, so none exists.
    #[error("no violation: {0}")]
    NotViolated(String),

    /// A construction step hits a degenerate configuration (zero denominator,
    /// affinely dependent posteriors, infeasible parameter).
    #[error("degenerate construction: {0}")]
    Degenerate(String),

    /// Operation outside the supported desk-scale envelope.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, SimilError>;
