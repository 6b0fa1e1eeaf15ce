use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("infeasible constraint set: {0}")]
    Infeasible(String),

    #[error("solver did not converge after {iterations} iterations")]
    NotConverged { iterations: usize, best: Vec<f64> },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("design failed after {attempts} attempts: {reason}")]
    DesignFailed { attempts: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by bad input rather than a solver breaking down.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Dimension(_) | Error::Config(_) | Error::InvalidInput(_) | Error::Json(_)
        )
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
