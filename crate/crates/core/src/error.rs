use std::fmt;

use thiserror::Error;

use crate::reader::{Loc, SyntaxError};

/// A runtime error raised while evaluating an expression.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalError {
    pub message: String,
    pub loc: Option<Loc>,
}

impl EvalError {
    pub fn new(message: impl Into<String>) -> Self {
        EvalError { message: message.into(), loc: None }
    }

    pub fn at(message: impl Into<String>, loc: Loc) -> Self {
        EvalError { message: message.into(), loc: Some(loc) }
    }

    /// Attaches `loc` unless a more precise location is already present.
    pub fn located(mut self, loc: Loc) -> Self {
        if self.loc.is_none() {
            self.loc = Some(loc);
        }
        self
    }
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.loc {
            Some(loc) => write!(f, "Error at {loc}: {}", self.message),
            None => write!(f, "Error: {}", self.message),
        }
    }
}

impl std::error::Error for EvalError {}

/// Anything that can go wrong between source text and a value.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum MlsError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    /// A file or module that could not be read.
    #[error("{0}")]
    Input(String),
}

pub type EvalResult<T> = Result<T, EvalError>;

macro_rules! bail {
    ($($arg:tt)*) => {
        return Err($crate::error::EvalError::new(format!($($arg)*)).into())
    };
}
pub(crate) use bail;
