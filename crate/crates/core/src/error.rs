use thiserror::Error;

/// Errors raised anywhere in the engine.
///
/// The variants map onto the CLI exit codes: input and parse problems are
/// `1`, invariant violations `2`, internal assertion failures `3`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("not a two-stage algebra: d({generator}) involves `{offending}`, which is not closed")]
    NotTwoStage { generator: String, offending: String },

    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("internal assertion failed: {0}")]
    Internal(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Input(_) => "input",
            Error::Parse { .. } => "parse",
            Error::NotTwoStage { .. } => "not_two_stage",
            Error::Invariant(_) => "invariant",
            Error::Internal(_) => "internal",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Parse { .. } | Error::NotTwoStage { .. } => 1,
            Error::Invariant(_) => 2,
            Error::Internal(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
