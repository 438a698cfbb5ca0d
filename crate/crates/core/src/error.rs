use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("config error: {0}")]
    Config(String),
    #[error("check of degree {degree} exceeds the cap of {cap}")]
    DegreeCap { degree: usize, cap: usize },
    #[error("could not build a code without double edges and 4-cycles (seed {seed})")]
    RejectionBudget { seed: u64 },
    #[error("no codeword of weight {weight} found within {trials} trials")]
    NoCodeword { weight: usize, trials: u64 },
    #[error("LP is infeasible")]
    Infeasible,
    #[error("LP solver failed: {0}")]
    Solver(String),
    #[error("distance is undefined: pseudo-codeword coincides with the codeword in signal space")]
    DegenerateDistance,
    #[error("spectrum is empty: {0}")]
    EmptySpectrum(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Coarse error class used for process exit codes and the C API.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Usage,
    Input,
    Io,
    Solver,
    Analysis,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Usage => 2,
            ErrorCategory::Input => 3,
            ErrorCategory::Io => 4,
            ErrorCategory::Solver => 5,
            ErrorCategory::Analysis => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ErrorCategory::Usage => "usage",
            ErrorCategory::Input => "input",
            ErrorCategory::Io => "io",
            ErrorCategory::Solver => "solver",
            ErrorCategory::Analysis => "analysis",
        }
    }
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidArgument(_) | Error::Config(_) => ErrorCategory::Usage,
            Error::LengthMismatch { .. }
            | Error::Parse { .. }
            | Error::DegreeCap { .. }
            | Error::RejectionBudget { .. }
            | Error::NoCodeword { .. } => ErrorCategory::Input,
            Error::Io(_) | Error::Csv(_) => ErrorCategory::Io,
            Error::Infeasible | Error::Solver(_) => ErrorCategory::Solver,
            Error::DegenerateDistance | Error::EmptySpectrum(_) => ErrorCategory::Analysis,
        }
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::LengthMismatch { expected, found });
    }
    Ok(())
}
