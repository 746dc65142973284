use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("variable {0} appears in no clause")]
    IsolatedVariable(usize),
    #[error("brute force limited to {cap} variables, instance has {n}")]
    TooManyVariables { n: usize, cap: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("LP solver failure: {0}")]
    Solver(String),
    #[error("LP is {0}")]
    LpStatus(String),
    #[error("weights are infeasible: {0}")]
    Infeasible(String),
    #[error("instance synthesis needs {needed} clauses, cap is {cap}")]
    ClauseCap { needed: u128, cap: usize },
    #[error("no admissible parameters found: {0}")]
    NoCertificate(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
