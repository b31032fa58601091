use std::path::PathBuf;

use thiserror::Error;

use crate::geometry::Frame;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of a formula.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("frame mismatch: {left:?} vs {right:?}")]
    FrameMismatch { left: Frame, right: Frame },

    #[error("epoch mismatch: {left} s vs {right} s")]
    EpochMismatch { left: f64, right: f64 },

    #[error("direction undefined: target coincides with observer")]
    UndefinedDirection,

    #[error("kepler solver did not converge after {iterations} iterations (e = {eccentricity}, M = {mean_anomaly} rad)")]
    KeplerDivergence {
        iterations: usize,
        eccentricity: f64,
        mean_anomaly: f64,
    },

    #[error("elevation {elevation_deg} deg is at or below the horizon; no atmospheric path")]
    BelowHorizon { elevation_deg: f64 },

    #[error("numerical failure in {op}: {msg}")]
    Numeric { op: &'static str, msg: String },

    #[error("configuration error at `{path}`: {msg}")]
    Config { path: String, msg: String },

    #[error("propagation failed at epoch {epoch_s} s: {source}")]
    AtEpoch {
        epoch_s: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            op,
            msg: msg.into(),
        }
    }

    pub(crate) fn numeric(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Numeric {
            op,
            msg: msg.into(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            msg: msg.into(),
        }
    }

    /// True for configuration/usage errors (as opposed to numeric failures).
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config { .. } => true,
            Error::AtEpoch { source, .. } => source.is_config(),
            _ => false,
        }
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
