//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A truncated sum or adaptive quadrature hit its hard cap before the
    /// tail/error bound dropped below tolerance.
    #[error("did not converge: {0}")]
    Nonconvergence(String),

    /// The denominator derivative is inside the zero band, so H would be
    /// meaningless at this point.
    #[error("denominator derivative vanishes near {at}")]
    DerivativeDegeneracy { at: f64 },

    /// The denominator series/transform evaluated non-positive.
    #[error("denominator not positive at {at} (value {value})")]
    NonpositiveDenominator { at: f64, value: f64 },

    /// A sign-change scan found no bracket for the requested root.
    #[error("no sign change found over [{lo}, {hi}]")]
    BracketNotFound { lo: f64, hi: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
