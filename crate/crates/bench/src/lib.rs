//! Experiment harness for the chance-constraint risk bounds: the transfer
//! tables, the dimension sweep and a generic constraint check.

pub mod check;
pub mod fixtures;
pub mod format;
pub mod output;
pub mod sweep;
pub mod tables;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed flags or input; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// Valid input the methods cannot handle; exit code 1.
    #[error("{0}")]
    Domain(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn from_core(e: ccrisk::Error) -> Self {
        CliError::Domain(e.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<ccrisk::Error> for CliError {
    fn from(e: ccrisk::Error) -> Self {
        CliError::from_core(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
