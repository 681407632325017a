//! Crate-wide error with stable short codes.

use thiserror::Error;

use crate::compile::CompileError;
use crate::curve::CurveError;
use crate::field::FieldError;
use crate::formula::{EvalError, ParseError, TermError};
use crate::neighbourhood::NeighbourhoodError;
use crate::normalize::NormalizeError;
use crate::schemas::SchemaError;
use crate::solver::SearchError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Neighbourhood(#[from] NeighbourhoodError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("{0}")]
    Input(String),
}

impl Error {
    /// Stable identifier, e.g. for scripts matching on failures.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Field(_) => "field",
            Error::Parse(_) => "parse",
            Error::Term(_) => "term",
            Error::Eval(_) => "eval",
            Error::Normalize(NormalizeError::DnfTooLarge(_)) => "cap",
            Error::Normalize(_) => "normalize",
            Error::Neighbourhood(NeighbourhoodError::Search(_)) | Error::Search(_) => "cap",
            Error::Neighbourhood(_) => "neighbourhood",
            Error::Compile(_) => "compile",
            Error::Curve(CurveError::CapExceeded(_)) => "cap",
            Error::Curve(_) => "curve",
            Error::Schema(_) => "schema",
            Error::Input(_) => "input",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
