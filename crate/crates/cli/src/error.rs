use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config {path}: {message}")]
    Config { path: String, message: String },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Sim(#[from] spinorbit::Error),

    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),

    #[error("formatting csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("formatting json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for a degenerate scenario, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Sim(spinorbit::Error::ZeroState) => 2,
            _ => 1,
        }
    }
}
