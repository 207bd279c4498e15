use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error(
        "conversion error in column `{column}` at row {row}: cannot read `{value}` as a number"
    )]
    Conversion {
        column: String,
        row: usize,
        value: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("target value `{0}` does not occur in the label column")]
    TargetAbsent(String),

    #[error("oracle refused: {0}")]
    OracleGuard(String),

    #[error("internal error: {0}")]
    Internal(String),
}
