use std::path::Path;

use exemplar_core::model::ModelError;
use thiserror::Error;

/// A failed stage, classified by the exit status it maps to.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0:#}")]
    Data(anyhow::Error),
    #[error("{0:#}")]
    Numerical(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::Data(_) => 2,
            Self::Numerical(_) => 3,
        }
    }

    pub fn data(msg: impl std::fmt::Display) -> Self {
        Self::Data(anyhow::anyhow!("{msg}"))
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        if err.kind() == std::io::ErrorKind::NotFound {
            Self::data(format!("missing input: {}", path.display()))
        } else {
            Self::Data(anyhow::Error::new(err).context(path.display().to_string()))
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Config(msg) => Self::Usage(msg),
            e @ ModelError::NonFiniteLoss { .. } => Self::Numerical(e.into()),
            e => Self::Data(e.into()),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
