use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] dirac_core::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("runtime error: {0}")]
    Runtime(String),
}

pub type LabResult<T> = std::result::Result<T, LabError>;

impl LabError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io { path: path.into(), source }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LabError::Config(_) => "config",
            LabError::CheckFailed(_) => "check",
            LabError::Io { .. } => "io",
            LabError::Core(_) => "numerics",
            LabError::Csv(_) | LabError::Json(_) => "format",
            LabError::Runtime(_) => "runtime",
        }
    }

    /// 2 for configuration errors, 3 for failed checks, 4 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 2,
            LabError::CheckFailed(_) => 3,
            _ => 4,
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Payload<'a> {
            error: &'a str,
            message: String,
            exit_code: i32,
        }
        let p = Payload { error: self.kind(), message: self.to_string(), exit_code: self.exit_code() };
        serde_json::to_string(&p).expect("plain struct serialises")
    }
}
