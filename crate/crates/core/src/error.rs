// SPDX-License-Identifier: Apache-2.0

use crate::instance::{PabulibError, ValidationErrors};
use crate::rational::ParseRationalError;

/// Failure to read an election file.
#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Rational(#[from] ParseRationalError),
    #[error(transparent)]
    Pabulib(#[from] PabulibError),
    #[error(transparent)]
    Invalid(#[from] ValidationErrors),
}
