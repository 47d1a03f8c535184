use thiserror::Error;

use crate::statevec::GroundStateResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("lanczos did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        best: Box<GroundStateResult>,
    },

    #[error("numerical consistency check failed: {0}")]
    Numerical(String),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("imaginary-time step failed after {attempts} attempts (last energy change {energy_change:.3e}, d_beta {d_beta:.3e})")]
    StepFailure {
        attempts: usize,
        energy_change: f64,
        d_beta: f64,
    },

    #[error("ground-state tracking diverged: fidelity {fidelity:.6} below {threshold}")]
    TrackingDivergence { fidelity: f64, threshold: f64 },

    #[error("training diverged at iteration {iteration}")]
    TrainingDivergence { iteration: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
