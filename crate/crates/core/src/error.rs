use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("resource limit exceeded: {what}{}", feasible_note(*.largest_feasible))]
    Resource {
        what: String,
        largest_feasible: Option<usize>,
    },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("integer overflow in exact coordinate arithmetic")]
    Overflow,

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}

fn feasible_note(largest: Option<usize>) -> String {
    largest
        .map(|n| format!(" (largest feasible: {n})"))
        .unwrap_or_default()
}
