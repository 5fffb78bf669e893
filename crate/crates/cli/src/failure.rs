//! Command failures and their process exit codes.

use std::process::ExitCode;

use gardner5::Error;

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    /// A verification check missed its tolerance; reports were still written.
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("runtime guard tripped: {0}")]
    Guard(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Failure::CheckFailed(_) => 1,
            Failure::Invalid(_) | Failure::Io { .. } => 2,
            Failure::Guard(_) => 3,
        })
    }

    pub fn io(path: impl AsRef<std::path::Path>) -> impl FnOnce(std::io::Error) -> Failure {
        let path = path.as_ref().display().to_string();
        move |source| Failure::Io { path, source }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BlowUp { .. } | Error::SolutionNaN(_) => Failure::Guard(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

pub type Outcome<T = ()> = Result<T, Failure>;
