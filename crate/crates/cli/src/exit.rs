use std::fmt;

use moyallax_core::Error;

pub const OK: u8 = 0;
pub const USAGE: u8 = 1;
pub const CONSISTENCY: u8 = 2;
pub const VERIFY: u8 = 3;
pub const INTERRUPTED: u8 = 130;

/// A failed run: message for stderr and the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: USAGE,
            message: message.into(),
        }
    }

    pub fn io(err: std::io::Error) -> Self {
        Failure {
            code: USAGE,
            message: format!("i/o error: {err}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::Parse(_)
            | Error::InvalidWindow(_)
            | Error::TruncationMismatch(_)
            | Error::Ramification(_)
            | Error::Unstable(..)
            | Error::NotLaxOperator(_)
            | Error::InsufficientDepth(_)
            | Error::UnboundedExpansion(_) => USAGE,
            Error::Consistency(_)
            | Error::NotExact(_)
            | Error::NotGradient(_)
            | Error::NegativeEpsilon(_) => CONSISTENCY,
            Error::Cancelled => INTERRUPTED,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
