use std::path::PathBuf;

use thiserror::Error;

use crate::vector::Vector;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid hyper-parameter: {0}")]
    InvalidHyperParameter(String),

    #[error("invalid analysis parameter: {0}")]
    InvalidAnalysisParameter(String),

    #[error("invalid objective at t={t}: {reason}")]
    InvalidObjective { t: usize, reason: String },

    #[error("shape mismatch: expected dimension {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    /// Non-finite or runaway iterate. Carries the offending point so the
    /// harness can record it.
    #[error("divergence at t={t}")]
    Divergence { t: usize, state: Vector },

    /// `beta = 1` makes `(1 - beta)^-2` infinite.
    #[error("degenerate beta (beta = 1): c7 is undefined")]
    DegenerateBeta,

    #[error("hessian trace estimation failed at t={t}")]
    EstimationFailure { t: usize },

    #[error("best-fixed-point solver did not reach tol {tol:e} in {iterations} iterations (|grad| = {grad_norm:e})")]
    SolverFailure {
        tol: f64,
        iterations: usize,
        grad_norm: f64,
        best: Vector,
    },

    #[error("metric `{0}` requires a known optimum")]
    UnsupportedMetric(&'static str),

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown preset `{0}` (expected fig1, fig2, fig3 or example1)")]
    UnknownPreset(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
