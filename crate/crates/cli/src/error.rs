use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] bellctx::Error),
    #[error("invariant breach: {0}")]
    Invariant(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 1 usage, 2 validation, 3 invariant breach.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) | CliError::Core(_) | CliError::Io { .. } => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
