use std::path::PathBuf;

use thiserror::Error;

use crate::conic::SolverStatus;

#[derive(Debug, Error)]
pub enum Error {
    #[error("eigendecomposition of a {dim}x{dim} matrix did not converge within {iterations} iterations")]
    EigenNotConverged { dim: usize, iterations: usize },

    #[error("matrix is not positive definite (pivot {pivot:e} at index {index}, threshold {threshold:e})")]
    NotPositiveDefinite { index: usize, pivot: f64, threshold: f64 },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid model at `{path}`: {message}")]
    InvalidModel { path: String, message: String },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("stage {stage}: {source}")]
    AtStage {
        stage: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid conic problem: {0}")]
    InvalidProblem(String),

    #[error("invalid solver settings: {0}")]
    InvalidSettings(String),

    #[error("solver stopped with status `{status}` (primal {primal:e}, dual {dual:e}, gap {gap:e}, {iterations} iterations)")]
    SolverFailed {
        status: SolverStatus,
        primal: f64,
        dual: f64,
        gap: f64,
        iterations: usize,
    },

    #[error("exhaustive search needs {formula} = {required} schedules, which exceeds the cap of {cap}")]
    CapExceeded { required: u128, formula: String, cap: u128 },

    #[error("the suboptimality bound needs an optimal schedule; compute one with brute force first")]
    MissingOptimalSchedule,

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn at_stage(stage: usize, err: Error) -> Self {
        Error::AtStage {
            stage,
            source: Box::new(err),
        }
    }

    pub(crate) fn model(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidModel {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EigenNotConverged { .. } => "eigen_not_converged",
            Error::NotPositiveDefinite { .. } => "not_positive_definite",
            Error::NotSymmetric { .. } => "not_symmetric",
            Error::Dimension(_) => "dimension",
            Error::InvalidModel { .. } => "invalid_model",
            Error::InvalidSchedule(_) => "invalid_schedule",
            Error::AtStage { source, .. } => source.kind(),
            Error::InvalidProblem(_) => "invalid_problem",
            Error::InvalidSettings(_) => "invalid_settings",
            Error::SolverFailed { .. } => "solver_failed",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::MissingOptimalSchedule => "missing_optimal_schedule",
            Error::Parse { .. } => "parse",
            Error::Io { .. } => "io",
        }
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SolverFailed { .. } => 3,
            Error::CapExceeded { .. } => 4,
            Error::AtStage { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
