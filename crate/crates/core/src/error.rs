use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MathError {
    #[error("non-finite input")]
    NonFinite,
    #[error("gain entries must be finite and strictly positive, got {0:?}")]
    NonPositiveGain([f64; 3]),
    #[error("exponent must satisfy 0.5 < p < 1, got {0}")]
    Exponent(f64),
    #[error("switch threshold must be positive, got {0}")]
    SwitchThreshold(f64),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ConfigError {
    pub(crate) fn at(line: usize, msg: impl Into<String>) -> Self {
        ConfigError::Line { line, msg: msg.into() }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        ConfigError::Invalid(msg.into())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("divergence at t = {t:.4} s: {reason}")]
    Divergence { t: f64, reason: String, dump: String },
    #[error("event time {t} precedes last event at {last}")]
    EventOrder { t: f64, last: f64 },
    #[error(transparent)]
    Math(#[from] MathError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("omega must satisfy 0 < omega < 1, got {0}")]
    Omega(f64),
    #[error("exponent must satisfy 0.5 < p < 1, got {0}")]
    Exponent(f64),
    #[error("{name} must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing key `{0}`")]
    Missing(&'static str),
    #[error("reports are not comparable: {0}")]
    Mismatch(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
