use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Physics {
        context: String,
        source: casimir_spin::Error,
    },

    #[error("verification failed: {0}")]
    Oracle(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Physics {
                source: casimir_spin::Error::Consistency { .. },
                ..
            } => 4,
            CliError::Physics { .. } => 3,
            CliError::Oracle(_) => 4,
            CliError::Io { .. } => 5,
        }
    }

    pub fn physics(context: impl Into<String>) -> impl FnOnce(casimir_spin::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Physics { context, source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
