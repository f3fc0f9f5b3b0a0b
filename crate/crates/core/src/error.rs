use std::fmt;

use thiserror::Error;

/// A syntax error with a character offset (and line, for multi-line files).
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub position: usize,
    pub line: Option<usize>,
    pub message: String,
}

impl ParseError {
    pub fn new(position: usize, message: impl Into<String>) -> Self {
        ParseError { position, line: None, message: message.into() }
    }

    pub fn at_line(mut self, line: usize) -> Self {
        self.line = Some(line);
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {}, column {}: {}", l, self.position + 1, self.message),
            None => write!(f, "at offset {}: {}", self.position, self.message),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error {0}")]
    Syntax(#[from] ParseError),
    #[error("temporal operator nested inside another temporal operator at offset {0}")]
    NestedTemporal(usize),
    #[error("undeclared predicate `{0}`")]
    UnknownPredicate(String),
    #[error("invalid time interval {0}")]
    InvalidInterval(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("trajectory ends at {have} but the formula needs it up to {needed}")]
    TrajectoryTooShort { needed: f64, have: f64 },
    #[error("separation point {tau} lies outside {interval}")]
    TauOutOfRange { tau: f64, interval: String },
    #[error("operand is not an until/eventually/globally node")]
    NotTemporal,
    #[error("partition set is missing required point {0}")]
    MissingPartitionPoint(f64),
    #[error("partition point {0} is not usable (must be >= 0, below the horizon, and strictly increasing from 0)")]
    BadPartitionPoint(f64),
    #[error("DNF expansion exceeded {0} clauses")]
    ClauseLimit(usize),
    #[error("conjunct is not interval-aligned: {0}")]
    NotIntervalAligned(String),
    #[error("predicate `{0}` is identically zero on the state space")]
    DegeneratePredicate(String),
    #[error("abstraction refinement budget exceeded: {fraction:.3} of the volume is in uncertified cells")]
    RefinementBudget { fraction: f64 },
    #[error("state {0:?} lies outside the state space")]
    OutsideStateSpace(Vec<f64>),
    #[error("unknown product state (q={q}, d={d})")]
    UnknownState { q: usize, d: usize },
    #[error("unknown dynamics model `{0}`")]
    UnknownDynamics(String),
    #[error("no accepting product state is reachable from the initial state")]
    NoLead,
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("configuration error (line {line}): {message}")]
    Config { line: usize, message: String },
    #[error("malformed solution file (line {line}): {message}")]
    SolutionFormat { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
