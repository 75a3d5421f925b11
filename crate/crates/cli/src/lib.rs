//! Command-line front end for the `reidzeta` library: problem files in,
//! JSON or table reports out.

pub mod input;
pub mod report;
pub mod run;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    NotTame(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Mismatch(_) | CliError::Internal(_) => 1,
            CliError::Validation(_) => 2,
            CliError::NotTame(_) => 3,
            CliError::Budget(_) => 4,
        }
    }
}

impl From<reidzeta::arith::ArithError> for CliError {
    fn from(e: reidzeta::arith::ArithError) -> Self {
        match e {
            reidzeta::arith::ArithError::SizeLimitExceeded { .. } => CliError::Budget(e.to_string()),
            e => CliError::Internal(e.to_string()),
        }
    }
}

impl From<reidzeta::engine::EngineError> for CliError {
    fn from(e: reidzeta::engine::EngineError) -> Self {
        use reidzeta::engine::EngineError;
        match e {
            EngineError::Arith(a) => a.into(),
            EngineError::NotTameAt { .. } | EngineError::HypothesisViolation { .. } => {
                CliError::NotTame(e.to_string())
            }
            e => CliError::Internal(e.to_string()),
        }
    }
}

impl From<reidzeta::zeta::ZetaError> for CliError {
    fn from(e: reidzeta::zeta::ZetaError) -> Self {
        use reidzeta::zeta::ZetaError;
        match e {
            ZetaError::Arith(a) => a.into(),
            ZetaError::Engine(a) => a.into(),
            e => CliError::Internal(e.to_string()),
        }
    }
}
