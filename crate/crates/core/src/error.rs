use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),

    #[error("invalid pseudometric `{name}`: {reason}")]
    InvalidMetric { name: String, reason: String },

    #[error("anchor index {anchor} out of range for {points} points")]
    InvalidAnchor { anchor: usize, points: usize },

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("measures live on different spaces")]
    SpaceMismatch,

    #[error("points carry no coordinates")]
    MissingCoordinates,

    #[error("non-finite value {value} in {context}")]
    NonFinite { context: &'static str, value: f64 },

    #[error("exponent q = {0} must be at least 1")]
    ExponentBelowOne(f64),

    #[error("measure has a negative weight {weight} at point {index}")]
    NegativeWeight { index: usize, weight: f64 },

    #[error("total masses differ: {left} vs {right}")]
    MassMismatch { left: f64, right: f64 },

    #[error("measure has zero total mass")]
    ZeroMass,

    #[error("support size {size} exceeds oracle limit {limit}")]
    SupportTooLarge { size: usize, limit: usize },

    #[error("LP solver failure: {0}")]
    Solver(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("test function `{label}` takes value {value} beyond declared bound {bound}")]
    UnboundedTestFunction { label: String, value: f64, bound: f64 },

    #[error("sequence has no declared limit")]
    MissingLimit,

    #[error("total variation {tv} exceeds bound {bound}")]
    UnboundedVariation { tv: f64, bound: f64 },

    #[error("schedule infeasible: tail T_{n} stays above 4^-{n} within horizon {horizon}")]
    ScheduleInfeasible { n: usize, horizon: u64 },

    #[error("schedule covers {available} blocks, {requested} requested")]
    HorizonTooShort { available: usize, requested: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
