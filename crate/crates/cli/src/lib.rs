//! File formats, reports and the command-line front end for `classchan-core`.
//!
//! - [`io`]: confusion-matrix CSV, hypothesis-class CSV, scenario files and
//!   trace CSV export.
//! - [`report`]: JSON report shapes.
//! - [`parallel`]: rayon-backed trial executor with the same counts as the
//!   serial one.
//! - [`cli`]: argument parsing and command dispatch.

pub mod cli;
pub mod io;
pub mod parallel;
pub mod report;

pub use cli::{run, Outcome};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{line}: {message}")]
    Input { path: String, line: usize, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] classchan_core::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
