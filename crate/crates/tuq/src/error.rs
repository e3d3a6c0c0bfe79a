use std::path::PathBuf;

/// Failures of the companion crate, grouped by CLI exit code.
#[derive(Debug, thiserror::Error)]
pub enum TuqError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: tuq_core::Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl TuqError {
    pub fn config(msg: impl Into<String>) -> Self {
        TuqError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        TuqError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            TuqError::Config(_) => 2,
            TuqError::Stage { .. } => 3,
            TuqError::Io { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, TuqError>;

/// Tags a core failure with the stage it happened in.
pub trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for tuq_core::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|source| TuqError::Stage { stage, source })
    }
}
