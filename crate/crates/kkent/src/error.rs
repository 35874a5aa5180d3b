use std::path::PathBuf;

/// Process exit status of the command-line tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    /// A single-point computation failed.
    ComputeFailure = 1,
    /// The configuration (or a file it names) is invalid.
    Config = 2,
    /// A sweep finished but some rows carry an error status.
    PartialSweep = 3,
    Io = 4,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("malformed config: {0}")]
    Malformed(String),
    #[error("unknown key `{key}`")]
    UnknownKey { key: String },
    #[error("missing key `{key}`: expected {expected}")]
    Missing { key: &'static str, expected: &'static str },
    #[error("invalid value for `{key}`: expected {expected}")]
    Invalid { key: String, expected: String },
    #[error("key `{key}` does not apply to mode `{mode}`")]
    NotForMode { key: String, mode: &'static str },
}

#[derive(Debug, thiserror::Error)]
pub enum KkentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Compute(#[from] kkent_core::Error),
}

impl KkentError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        KkentError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_status(&self) -> ExitStatus {
        match self {
            KkentError::Config(_) | KkentError::Format { .. } => ExitStatus::Config,
            KkentError::Io { .. } => ExitStatus::Io,
            KkentError::Compute(_) => ExitStatus::ComputeFailure,
        }
    }
}
