//! Error type shared by all commands, with the process exit-code mapping.

use rao_core::bound::BoundError;
use rao_core::generators::GenError;
use rao_core::harness::HarnessError;
use rao_core::model::ModelError;
use rao_core::oracles::OracleError;
use rao_core::rat::ParseRatError;
use thiserror::Error;

/// A failed command, classified by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad config, bad parameters, invalid instance, or I/O trouble.
    #[error("{0}")]
    Validation(String),
    /// A reader broke its contract during a trial.
    #[error("reader contract breach: {0}")]
    ContractBreach(String),
    /// The requested offline oracle cannot handle the instance.
    #[error("oracle limit: {0}")]
    OracleLimit(String),
}

impl CliError {
    /// 2 validation, 3 contract breach, 4 oracle limit; 0 is success.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::ContractBreach(_) => 3,
            CliError::OracleLimit(_) => 4,
        }
    }

    pub fn validation(err: impl std::fmt::Display) -> Self {
        CliError::Validation(err.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(err: OracleError) -> Self {
        match err {
            OracleError::LimitExceeded(_)
            | OracleError::NonIntegerLength(_)
            | OracleError::NotNonIncreasing(_) => CliError::OracleLimit(err.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(err: HarnessError) -> Self {
        match err {
            HarnessError::Trial { .. } => CliError::ContractBreach(err.to_string()),
            HarnessError::Oracle(oracle) => oracle.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<GenError> for CliError {
    fn from(err: GenError) -> Self {
        CliError::Validation(err.to_string())
    }
}

impl From<BoundError> for CliError {
    fn from(err: BoundError) -> Self {
        CliError::Validation(err.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(err: ModelError) -> Self {
        CliError::Validation(err.to_string())
    }
}

impl From<ParseRatError> for CliError {
    fn from(err: ParseRatError) -> Self {
        CliError::Validation(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Validation(err.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Validation(err.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        CliError::Validation(err.to_string())
    }
}
