use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {what} has length {got}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("fairness targets are infeasible (maximal tightness {delta_star:.6} <= 0)")]
    Infeasible { delta_star: f64 },

    #[error("tightness {delta} exceeds the maximal feasible tightness {delta_star}")]
    TightnessTooLarge { delta: f64, delta_star: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("queue/TSLR invariant violated for unit {unit} at round {t}: 1 + {queue} < {lambda} * {tslr}")]
    InvariantViolation {
        unit: usize,
        t: u64,
        queue: f64,
        tslr: u64,
        lambda: f64,
    },

    #[error("round {t} is beyond the trace horizon {horizon}")]
    OutOfTrace { t: u64, horizon: u64 },

    #[error("trace {source_name}: row {row}: {message}")]
    TraceParse {
        source_name: String,
        row: usize,
        message: String,
    },

    #[error("trace {0}: no rounds")]
    EmptyTrace(String),

    #[error("non-finite value while computing {0}")]
    NonFinite(&'static str),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config: {0}")]
    Config(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible { .. } | Error::TightnessTooLarge { .. } => 2,
            Error::InvariantViolation { .. } => 3,
            _ => 1,
        }
    }
}
