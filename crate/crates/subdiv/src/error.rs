use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("index {index} outside table range 1..={n_max}")]
    OutOfRange { index: u64, n_max: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("table too short: need index {need}, table ends at {have}")]
    TableTooShort { need: u64, have: u64 },
    #[error("rejected: {0}")]
    Rejected(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
