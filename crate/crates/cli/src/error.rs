use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{context}: {source}")]
    Data {
        context: String,
        #[source]
        source: lexiscreen_core::Error,
    },

    #[error("cannot read {}: {source}", path.display())]
    Input {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Data { source, .. } if !source.is_data_error() => ExitCode::from(4),
            CliError::Data { .. } | CliError::Input { .. } => ExitCode::from(3),
            CliError::Output { .. } | CliError::Internal(_) => ExitCode::from(4),
        }
    }
}

/// Attach a short description of what was being done to a core error.
pub trait Context<T> {
    fn context(self, what: impl Into<String>) -> Result<T, CliError>;
}

impl<T> Context<T> for lexiscreen_core::Result<T> {
    fn context(self, what: impl Into<String>) -> Result<T, CliError> {
        self.map_err(|source| CliError::Data {
            context: what.into(),
            source,
        })
    }
}
