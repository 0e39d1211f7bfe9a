use thiserror::Error;

use empkit_core::{EmpError, GraphError, SynthesisError, VerifyError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("`{path}` line {line}, column {column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Emp(#[from] EmpError),
    #[error("the {0} command needs --emp")]
    MissingEmp(&'static str),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error("explicit EMP {0} rejected by an oracle")]
    ExplicitRejected(String),
}

impl CliError {
    /// 2 for bad input, 3 for internal inconsistencies.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. }
            | CliError::Parse { .. }
            | CliError::Graph(_)
            | CliError::Emp(_)
            | CliError::MissingEmp(_)
            | CliError::Verify(VerifyError::Emp(_) | VerifyError::TooLarge { .. } | VerifyError::NoTrials)
            | CliError::Synthesis(SynthesisError::Verify(
                VerifyError::Emp(_) | VerifyError::TooLarge { .. } | VerifyError::NoTrials,
            )) => 2,
            _ => 3,
        }
    }
}
