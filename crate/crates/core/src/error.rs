use thiserror::Error;

/// Errors raised by the library. Every variant names the offending input.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Pauli label {label:?}: {reason}")]
    InvalidPauliLabel { label: String, reason: String },

    #[error("dimension mismatch in {context}: {left} vs {right}")]
    DimensionMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    #[error("observables {first} and {second} do not commute (commutator norm {norm:e})")]
    NonCommuting {
        first: String,
        second: String,
        norm: f64,
    },

    #[error("degenerate joint eigenspace: label {label:?} has multiplicity {multiplicity}")]
    Degenerate { label: Vec<i8>, multiplicity: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid observable {label}: {reason}")]
    InvalidObservable { label: String, reason: String },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("no table entry for lambda {lambda} and settings {settings:?}")]
    MissingEntry { lambda: usize, settings: Vec<usize> },

    #[error("conditioning on a zero-probability event (P = {probability:e})")]
    ZeroProbability { probability: f64 },

    #[error("invalid weights for {what}: {reason}")]
    InvalidWeights { what: String, reason: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("unknown agent {0:?}")]
    UnknownAgent(String),

    #[error("unknown symbol {symbol:?} in descriptor {descriptor:?}")]
    UnknownSymbol { symbol: String, descriptor: String },

    #[error("malformed descriptor {0:?}")]
    MalformedDescriptor(String),
}

pub type Result<T> = std::result::Result<T, Error>;
