//! Library side of the `canal` command-line tool: run configuration,
//! the verification battery, the subcommands and their file formats.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use canal_core::GeometryError;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Geometry(GeometryError),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// 2 for bad input, 3 for failures of the geometry at some point.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Geometry(e) if e.is_numeric_domain() => 3,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Geometry(e) if e.is_numeric_domain() => "numeric",
            CliError::Geometry(_) => "config",
            CliError::Io(_) => "io",
        }
    }

    /// JSON error report.
    pub fn report(&self) -> String {
        #[derive(Serialize)]
        struct Report<'a> {
            schema: u32,
            error: &'a str,
            message: String,
        }
        serde_json::to_string_pretty(&Report { schema: verify::SCHEMA, error: self.kind(), message: self.to_string() })
            .expect("plain struct")
    }
}

/// Exit code of a run that finished: 0 when every required check passed.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
