use omcal_core::ErrorKind;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, config file contents, or preset names.
    #[error("config: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Core {
        stage: &'static str,
        #[source]
        source: omcal_core::Error,
    },
}

impl CliError {
    /// 2 for configuration problems, 3 for bad data, 4 for numerical breakdown.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core { source, .. } => match source.kind() {
                ErrorKind::Config => 2,
                ErrorKind::Data => 3,
                ErrorKind::Numerical => 4,
            },
        }
    }
}

/// Attaches the pipeline stage to a core error.
pub trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, CliError>;
}

impl<T> Stage<T> for omcal_core::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Core { stage, source })
    }
}
