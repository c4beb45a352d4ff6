use std::fmt;
use std::process::ExitCode;

use spd_augment::Error;

/// Process exit status, one per failure class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Io = 1,
    Usage = 2,
    Incompatible = 3,
    Violation = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub status: Status,
    pub message: String,
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn new(status: Status, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(Status::Usage, message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(Status::Io, message)
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.status as u8)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io(_)
            | Error::Csv { .. }
            | Error::BadMagic { .. }
            | Error::VersionMismatch { .. }
            | Error::TruncatedPayload { .. }
            | Error::TrailingBytes { .. }
            | Error::LabelCountMismatch { .. } => Status::Io,
            Error::InvalidParameter { .. } | Error::NotADivisor { .. } | Error::TooLong { .. } => Status::Usage,
            _ => Status::Incompatible,
        };
        Self::new(status, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::io(e.to_string())
    }
}
