use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown preset `{0}` (see `list-presets`)")]
    UnknownPreset(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    /// Process exit code: 1 for bad input, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::UnknownPreset(_) => 1,
            HarnessError::Io(_) | HarnessError::Csv(_) => 2,
        }
    }
}

pub(crate) fn config_error(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}
