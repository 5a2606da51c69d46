use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty domain: {0}")]
    EmptyDomain(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("missing bad-prime data for p = {p} on curve {label}")]
    MissingBadPrimeData { label: String, p: u64 },

    #[error("prime table too small: limit {have} but at least {need} is required")]
    InsufficientPrimes { have: u64, need: u64 },

    #[error("empty family: no twist passes the filters with positive weight")]
    EmptyFamily,

    #[error("cost refusal: {0}")]
    Cost(String),

    #[error("truncation {given} is insufficient, at least {required} terms are required")]
    Truncation { given: usize, required: usize },

    #[error("catalog error at line {line}: {msg}")]
    Catalog { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
