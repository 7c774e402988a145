use std::fmt;

use iqa_core::Error as CoreError;

/// Process exit status of a failed run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Config = 2,
    DataFormat = 3,
    IncompleteInputs = 4,
}

impl ExitKind {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// An error tagged with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub kind: ExitKind,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(kind: ExitKind, error: impl Into<anyhow::Error>) -> Self {
        Failure {
            kind,
            error: error.into(),
        }
    }

    pub fn config(msg: impl fmt::Display) -> Self {
        Self::new(ExitKind::Config, anyhow::anyhow!("{msg}"))
    }

    pub fn incomplete(msg: impl fmt::Display) -> Self {
        Self::new(ExitKind::IncompleteInputs, anyhow::anyhow!("{msg}"))
    }

    pub fn data(msg: impl fmt::Display) -> Self {
        Self::new(ExitKind::DataFormat, anyhow::anyhow!("{msg}"))
    }

    pub fn context(self, ctx: impl fmt::Display) -> Self {
        Failure {
            kind: self.kind,
            error: self.error.context(ctx.to_string()),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

impl std::error::Error for Failure {}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        let kind = match &e {
            CoreError::Argument(_) => ExitKind::Config,
            CoreError::IncompleteGroup { .. } => ExitKind::IncompleteInputs,
            CoreError::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound => ExitKind::IncompleteInputs,
            CoreError::Io { .. } => ExitKind::Config,
            _ => ExitKind::DataFormat,
        };
        Failure::new(kind, e)
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;
