use nsfp_core::Error as CoreError;

/// Failure classes, each with its own process exit code.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical abort: {0}")]
    Numerical(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 2,
            AppError::Numerical(_) => 3,
            AppError::Io(_) => 4,
        }
    }

    pub fn from_core(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { .. }
            | CoreError::GridMismatch(_)
            | CoreError::InitialData(_)
            | CoreError::Lab(_) => AppError::Config(e.to_string()),
            CoreError::NonFinite { .. } | CoreError::Cfl { .. } | CoreError::PicardDiverged { .. } => {
                AppError::Numerical(e.to_string())
            }
            CoreError::Observer(m) => AppError::Io(m),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e.to_string())
    }
}
