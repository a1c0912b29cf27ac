//! Error type shared by every module of the crate.

use alloc::string::String;

/// Errors raised by the optimization toolkit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A search space needs at least one coordinate.
    #[error("search space must have at least one dimension")]
    EmptySpace,
    /// Lower and upper bound vectors disagree or are not strictly ordered.
    #[error(
        "invalid bounds at coordinate {index}: lower {lower} must be strictly below upper {upper}"
    )]
    InvalidBounds {
        /// Offending coordinate.
        index: usize,
        /// Lower bound at `index`.
        lower: f64,
        /// Upper bound at `index`.
        upper: f64,
    },
    /// Vector length does not match the problem dimension.
    #[error("expected a point of dimension {expected}, got {got}")]
    DimensionMismatch {
        /// Dimension of the search space.
        expected: usize,
        /// Length of the supplied vector.
        got: usize,
    },
    /// The point is outside the search box (or not finite).
    #[error("point lies outside the search space")]
    OutOfBounds,
    /// The point is within the duplicate tolerance of a stored sample.
    #[error("point duplicates sample {index} (squared distance {dist2:e})")]
    DuplicatePoint {
        /// Index of the nearest stored sample.
        index: usize,
        /// Squared distance to it.
        dist2: f64,
    },
    /// The operation needs at least one sample.
    #[error("dataset is empty")]
    EmptyDataset,
    /// No benchmark is registered under this name.
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    /// Lookahead objectives need an effective horizon of at least two.
    #[error("lookahead objectives need a horizon of at least 2, got {0}")]
    DegenerateHorizon(usize),
    /// Every multistart produced a non-finite objective.
    #[error("no finite minimizer found after {starts} starts")]
    NoMinimizerFound {
        /// Number of starts attempted.
        starts: usize,
    },
    /// A configuration value is out of its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
