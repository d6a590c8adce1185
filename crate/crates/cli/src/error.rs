use std::path::PathBuf;

use casimir_ema::ingestion::LoadError;
use thiserror::Error;

/// Process exit statuses. Usage errors from argument parsing exit with 2.
pub mod exit {
    pub const CONFIG: i32 = 3;
    pub const NUMERIC: i32 = 4;
    pub const IO: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure ({context}): {source}")]
    Numeric {
        context: String,
        #[source]
        source: casimir_ema::Error,
    },
    #[error("{}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Load(LoadError::Io { .. }) | CliError::Output { .. } => exit::IO,
            CliError::Load(_) | CliError::Config(_) => exit::CONFIG,
            CliError::Numeric { .. } => exit::NUMERIC,
        }
    }

    pub(crate) fn numeric(context: impl Into<String>, source: casimir_ema::Error) -> Self {
        CliError::Numeric {
            context: context.into(),
            source,
        }
    }
}
