use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {n} exceeds the limit {max} for this engine")]
    DimensionTooLarge { n: usize, max: usize },

    #[error("edge count {m} out of range for an {n}x{n} matrix (0..={max})")]
    EdgeCountOutOfRange { n: usize, m: usize, max: usize },

    #[error("enumeration budget exceeded: {need} items, limit {limit}")]
    BudgetExceeded { need: u128, limit: u128 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix parse error at line {line}, column {column}: {message}")]
    MatrixParse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
