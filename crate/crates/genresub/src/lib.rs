//! File formats, run configuration, and the repeated-trial benchmark
//! harness for the `genresub` command-line tool.

pub mod config;
pub mod harness;
pub mod io;

use thiserror::Error;

/// Failures surfaced by the tool, grouped by exit code.
#[derive(Debug, Error)]
pub enum AppError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("numeric error: {0}")]
    Numeric(#[from] genresub_core::Error),
}

impl AppError {
    /// 2 config, 3 IO, 4 numeric/estimation.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 2,
            AppError::Io(_) => 3,
            AppError::Numeric(_) => 4,
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e.to_string())
    }
}

impl From<csv::Error> for AppError {
    fn from(e: csv::Error) -> Self {
        AppError::Io(e.to_string())
    }
}
