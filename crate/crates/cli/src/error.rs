use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure in {stage}: {source}")]
    Numerical {
        stage: String,
        #[source]
        source: bridging_heat::Error,
    },

    /// Output was produced but a check encoded in the run failed.
    #[error("check failed: {0}")]
    Check(String),

    #[error("self-test failed: {0} check(s) did not pass")]
    SelfTest(usize),

    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            // an unusable output location is a configuration problem
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Numerical { .. } | CliError::Check(_) => 3,
            CliError::SelfTest(_) => 4,
        }
    }
}

/// Attaches the failing stage to a library error.
pub trait Stage<T> {
    fn stage(self, stage: &str) -> Result<T, CliError>;
}

impl<T> Stage<T> for bridging_heat::Result<T> {
    fn stage(self, stage: &str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Numerical {
            stage: stage.to_string(),
            source,
        })
    }
}
