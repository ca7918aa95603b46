use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

impl HarnessError {
    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        HarnessError::Io { path: path.to_path_buf(), message: err.to_string() }
    }

    pub fn format(path: &Path, message: impl Into<String>) -> Self {
        HarnessError::Format { path: path.to_path_buf(), message: message.into() }
    }

    /// 1 usage or config, 2 I/O or malformed input, 3 non-finite values.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage(_) => 1,
            HarnessError::Io { .. } | HarnessError::Format { .. } => 2,
            HarnessError::Numerical(_) => 3,
        }
    }
}

impl From<robustpr::Error> for HarnessError {
    fn from(e: robustpr::Error) -> Self {
        match e {
            robustpr::Error::NonFinite(_) => HarnessError::Numerical(e.to_string()),
            other => HarnessError::Usage(other.to_string()),
        }
    }
}
