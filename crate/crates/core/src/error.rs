use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("inverse operator requires sigma = 1, got {0}")]
    NotCritical(String),

    #[error("inverse operator recursion exceeded its cap at term G^{gauss} zeta^{zeta}")]
    InverseDiverged { gauss: u32, zeta: u32 },

    #[error("reduction did not converge after {iterations} iterations; {surviving} residual terms survive, e.g. {sample}")]
    NotConverged {
        iterations: usize,
        surviving: usize,
        sample: String,
    },

    #[error("solver aborted at t = {time}: {reason}")]
    SolverAborted { time: f64, reason: String },
}

impl Error {
    /// `true` for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::InverseDiverged { .. } | Error::NotConverged { .. } | Error::SolverAborted { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
