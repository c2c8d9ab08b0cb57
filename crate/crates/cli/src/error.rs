use std::fmt;

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Solver(String),
    Io(String),
    /// At least one invariant check failed.
    CheckFailed,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed => 1,
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Solver(m) => write!(f, "solver error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::CheckFailed => write!(f, "invariant checks failed"),
        }
    }
}

impl From<fracfp::Error> for CliError {
    fn from(e: fracfp::Error) -> Self {
        use fracfp::Error::*;
        match e {
            InvalidArgument(_) | UnsupportedCombination(_) => CliError::Config(e.to_string()),
            Accuracy(_) | SingularMatrix { .. } | Solver { .. } => CliError::Solver(e.to_string()),
        }
    }
}
