use std::fmt;
use std::process::ExitCode;

use campus_ties::Error;

/// Command failure, carrying the exit-code class.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or arguments (exit 1).
    Usage(String),
    /// Unreadable or malformed input (exit 2).
    Input(String),
    /// Too little data for the requested statistic (exit 3).
    Insufficient(String),
    /// A manifest re-run produced different bytes (exit 4).
    Mismatch(String),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Insufficient(_) => 3,
            Failure::Mismatch(_) => 4,
        })
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m)
            | Failure::Input(m)
            | Failure::Insufficient(m)
            | Failure::Mismatch(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::InvalidArgument(_) => Failure::Usage(msg),
            Error::Io(_) | Error::Format { .. } => Failure::Input(msg),
            Error::InsufficientData(_) | Error::Undefined(_) | Error::Disconnected => {
                Failure::Insufficient(msg)
            }
        }
    }
}
