use thiserror::Error;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("I/O: {0}")]
    Io(String),

    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: pulseflow::Error,
    },
}

impl CliError {
    pub fn stage(stage: &'static str) -> impl FnOnce(pulseflow::Error) -> CliError {
        move |source| CliError::Stage { stage, source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
            CliError::Stage { source, .. } => match source {
                pulseflow::Error::Io(_) | pulseflow::Error::Parse { .. } => EXIT_IO,
                e if e.is_numeric() => EXIT_NUMERIC,
                _ => EXIT_CONFIG,
            },
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
