use thiserror::Error;

use crate::space::MetricViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong across the crate.
///
/// Variants fall in two families: input problems (unknown ids, mismatched
/// point sets, malformed files) and rule violations that carry a witness
/// (a pair, a triple, a point) for the axiom that failed.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate point id `{0}`")]
    DuplicatePoint(String),

    #[error("unknown point id `{0}`")]
    UnknownPoint(String),

    #[error("point index {index} out of range for a space of {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("point sets differ: {0}")]
    PointSetMismatch(String),

    #[error("metric axioms violated ({} violation(s)); first: {}", .0.len(), .0[0])]
    InvalidMetric(Vec<MetricViolation>),

    #[error("(D1) fails: d({x}, {y}) = {value} < 1")]
    GapBelowOne { x: String, y: String, value: f64 },

    #[error("(D2) fails: base distance d0({x}, {y}) is infinite but d({x}, {y}) = {value}")]
    FiniteOverInfinite { x: String, y: String, value: f64 },

    #[error("space has {len} points, above the configured limit of {limit}")]
    TooLarge { len: usize, limit: usize },

    #[error("entry at ({x}, {y}) sits at distance {distance}, above the radius {radius}")]
    PropagationExceeds {
        x: String,
        y: String,
        distance: f64,
        radius: f64,
    },

    #[error("entry at ({x}, {y}) sits on an infinite-distance pair; no finite propagation")]
    InfinitePropagation { x: String, y: String },

    #[error(
        "power iteration did not converge after {iterations} iterations (best estimate {estimate})"
    )]
    NormNotConverged { estimate: f64, iterations: usize },

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("unknown group element `{0}`")]
    UnknownElement(String),

    #[error("invalid block representation: {0}")]
    InvalidBlock(String),

    #[error("(HR1) fails at `{x}`: {reason}")]
    Hr1Violation { x: String, reason: String },

    #[error("negative value {value} in the vector of `{x}` at `{z}`")]
    NegativeValue { x: String, z: String, value: f64 },

    #[error("support of the vector of `{x}` reaches `{z}` at distance {distance} > {radius}")]
    SupportTooWide {
        x: String,
        z: String,
        distance: f64,
        radius: f64,
    },

    #[error("no vector supplied for net point `{0}`")]
    MissingNetVector(String),

    #[error("stage {index} fails its Higson-Roe check: {reason}")]
    StageFailed { index: usize, reason: String },

    #[error("`{0}` has no preimage")]
    NoPreimage(String),

    #[error("`{0}` is not in the chosen subset")]
    NotInSubset(String),

    #[error("image index ({y}, {m}) falls outside the output window of size {window}")]
    OutsideWindow { y: String, m: usize, window: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("{path}: {source}")]
    InFile { path: String, source: Box<Error> },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
