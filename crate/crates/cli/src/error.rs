use std::path::PathBuf;

use flowlab::FlowError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{cell}: {source}")]
    Cell { cell: String, source: FlowError },
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid argument: {0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    /// 1 for numeric failures, 2 for configuration and usage problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Cell { source, .. } | CliError::Flow(source) => match source {
                FlowError::Numeric(_) => 1,
                FlowError::Domain(_) | FlowError::Config(_) => 2,
            },
            CliError::Failed(_) => 1,
            CliError::Io { .. } | CliError::Usage(_) => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) trait CellContext<T> {
    fn cell(self, describe: impl FnOnce() -> String) -> CliResult<T>;
}

impl<T> CellContext<T> for flowlab::Result<T> {
    fn cell(self, describe: impl FnOnce() -> String) -> CliResult<T> {
        self.map_err(|source| CliError::Cell { cell: describe(), source })
    }
}
