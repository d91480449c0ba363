use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Model(#[from] ep3sense_core::Error),

    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    /// 0 is success; 2 bad input; 3 numerical failure; 1 anything else.
    pub fn exit_code(&self) -> u8 {
        use ep3sense_core::Error as E;
        match self {
            CliError::Validation(_) => 2,
            CliError::Model(e) if e.is_numerical() => 3,
            CliError::Model(E::DegenerateTrace(_)) => 3,
            CliError::Model(E::Io(_) | E::Csv(_) | E::Json(_)) => 1,
            CliError::Model(_) => 2,
            CliError::File { .. } | CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 1,
        }
    }
}
