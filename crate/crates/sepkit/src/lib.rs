//! Command-line frontend for the holomorphic-flow analysis library:
//! phase portraits, direction fields, equilibria, separatrix localization
//! and escape-time reports, with CSV/JSON/SVG export.

pub mod cli;
pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

use thiserror::Error;

/// Process exit codes: 0 success, 2 usage or parse error, 3 no converged
/// result, 4 I/O error.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Expr(#[from] sepkit_core::ParseError),
    #[error("invalid {what}: {detail}")]
    Usage { what: &'static str, detail: String },
    #[error("{0}")]
    Method(#[from] sepkit_core::MethodError),
    #[error("no converged result")]
    NoResult,
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("config file: {0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Expr(_) | CliError::Usage { .. } | CliError::Config(_) => 2,
            CliError::Method(_) | CliError::NoResult => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn usage(what: &'static str, detail: impl Into<String>) -> Self {
        CliError::Usage {
            what,
            detail: detail.into(),
        }
    }
}
