use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid spec: {field}: {message}")]
    InvalidSpec { field: String, message: String },

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("oracle disagreement: {0}")]
    OracleDisagreement(String),
}

impl CliError {
    pub fn spec(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::InvalidSpec { field: field.into(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::InvalidSpec { .. } => 1,
            CliError::OracleDisagreement(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<qlidar::Error> for CliError {
    fn from(e: qlidar::Error) -> Self {
        CliError::spec("model", e.to_string())
    }
}
