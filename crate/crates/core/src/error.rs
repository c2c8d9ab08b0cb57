use std::fmt;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a precondition.
    InvalidArgument(String),
    /// The requested initial-data variant cannot be discretised with the chosen method.
    UnsupportedCombination(String),
    /// A numerical routine could not reach its accuracy target.
    Accuracy(String),
    /// Exact zero pivot encountered while factoring a tridiagonal matrix.
    SingularMatrix { row: usize },
    /// A time step failed; carries the step index and pivot diagnostics.
    Solver {
        step: usize,
        pivot_growth: f64,
        detail: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::UnsupportedCombination(msg) => write!(f, "unsupported combination: {msg}"),
            Error::Accuracy(msg) => write!(f, "accuracy target not reached: {msg}"),
            Error::SingularMatrix { row } => write!(f, "singular matrix: zero pivot in row {row}"),
            Error::Solver {
                step,
                pivot_growth,
                detail,
            } => write!(
                f,
                "solver failure at step {step} (pivot growth {pivot_growth:.3e}): {detail}"
            ),
        }
    }
}

impl std::error::Error for Error {}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
