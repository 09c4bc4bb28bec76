use ruelle_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;
pub const EXIT_CONFIG: u8 = 4;

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(CoreError::DepthCapExceeded { .. })
            | CliError::Core(CoreError::VolumeOutOfRange(_))
            | CliError::Core(CoreError::EnumerationTooLarge(_)) => EXIT_RESOURCE,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => EXIT_RESOURCE,
            _ => EXIT_CONFIG,
        }
    }
}
