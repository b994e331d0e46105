use std::fmt;
use std::io;
use std::path::Path;

use mignotte_core::smtbridge::SmtError;

#[derive(Debug)]
pub enum CliError {
    /// Validation or domain failure.
    Domain(String),
    Io(String),
    /// The optional external solver could not be started.
    Unavailable(String),
    /// Standard output was closed early, as in `mignotte audit ... | head`.
    Closed,
}

impl CliError {
    pub const USAGE: u8 = 1;

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Io(_) => 2,
            CliError::Unavailable(_) => 4,
            CliError::Closed => 0,
        }
    }

    pub fn io(path: &Path, err: io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Domain(m) | CliError::Io(m) | CliError::Unavailable(m) => f.write_str(m),
            CliError::Closed => f.write_str("output closed"),
        }
    }
}

impl From<mignotte_core::Error> for CliError {
    fn from(e: mignotte_core::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<SmtError> for CliError {
    fn from(e: SmtError) -> Self {
        match e {
            SmtError::SolverUnavailable { .. } => CliError::Unavailable(e.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::BrokenPipe {
            return CliError::Closed;
        }
        CliError::Io(e.to_string())
    }
}
