use std::fmt;

/// Process exit statuses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    Io = 2,
    Degenerate = 3,
    TooSmall = 4,
    BadFlags = 5,
}

/// An error with the exit status it should produce.
#[derive(Debug)]
pub struct Failure {
    pub code: ExitCode,
    pub message: String,
}

impl Failure {
    pub fn new(code: ExitCode, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn bad_flags(message: impl Into<String>) -> Self {
        Self::new(ExitCode::BadFlags, message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(ExitCode::Io, message)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

impl From<scssim::Error> for Failure {
    fn from(e: scssim::Error) -> Self {
        use scssim::Error::*;
        let code = match &e {
            FileNotFound(_) | Io(_) | UnsupportedFormat(_) | CorruptData(_) | InvalidImage(_)
            | SchemaViolation(_) => ExitCode::Io,
            DegenerateImage => ExitCode::Degenerate,
            ImageTooSmall { .. } => ExitCode::TooSmall,
            RegionOutOfBounds { .. } | WindowOutOfBounds { .. } | InvalidParameter(_) => {
                ExitCode::BadFlags
            }
        };
        Self::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Self::io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, Failure>;
