//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the crate.
///
/// The variants split into two families: violated input contracts
/// (`InvalidInput`, `Inadmissible*`, `Capability`) and numeric failures
/// discovered mid-computation (`Numeric`, `NonpositiveDensity`). The CLI maps
/// the former to exit code 2 and the latter to exit code 1.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A precondition on the inputs does not hold.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A dependence-parameter vector violates the sign constraints.
    /// `m` is the count of ones at which the margin is most negative.
    #[error("inadmissible parameters: margin g({m}) = {margin:e} < 0")]
    Inadmissible { m: usize, margin: f64 },

    /// A joint-success-probability vector implies a negative probability.
    #[error("inadmissible zeta vector: implied Pr(N = {k}) = {value:e} < 0")]
    InadmissibleZeta { k: usize, value: f64 },

    /// The request is valid but outside what this build can compute.
    #[error("capability exceeded: {0}")]
    Capability(String),

    /// A numeric procedure failed (root bracketing, NaN, singular solve, ...).
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// A density evaluated to zero or below at the named observation row.
    #[error("nonpositive density {value:e} at observation row {row}")]
    NonpositiveDensity { row: usize, value: f64 },
}

impl Error {
    /// Process exit code the CLI uses for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_)
            | Error::Inadmissible { .. }
            | Error::InadmissibleZeta { .. }
            | Error::Capability(_) => 2,
            Error::Numeric(_) | Error::NonpositiveDensity { .. } => 1,
        }
    }
}
