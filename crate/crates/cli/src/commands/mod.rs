//! One module per subcommand. Each returns the text destined for stdout (or
//! `--out`) plus diagnostic notes for stderr.

pub mod limits;
pub mod plot;
pub mod ratio;
pub mod table;
pub mod verify;

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub body: String,
    pub notes: Vec<String>,
    /// Set when the command produced output but a check it performs failed.
    pub failure: Option<String>,
}

impl Output {
    pub fn new(body: String) -> Self {
        Output {
            body,
            ..Output::default()
        }
    }
}

pub(crate) fn check_n(n: usize) -> crate::error::CliResult<()> {
    if (2..=12).contains(&n) {
        Ok(())
    } else {
        Err(crate::error::CliError::Usage(format!("--n {n} must lie in 2..=12")))
    }
}
