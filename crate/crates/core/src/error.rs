use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension {k} out of supported range (max {max})")]
    DimensionOutOfRange { k: usize, max: usize },
    #[error("row {row} has {found} entries, expected {expected}")]
    RowLength { row: usize, found: usize, expected: usize },
    #[error("entry {0} overflows the exact integer fast path")]
    EntryOverflow(String),
    #[error("malformed rational {0:?}")]
    MalformedRational(String),
    #[error("row index {index} out of range for a map with {m} rows")]
    RowIndex { index: usize, m: usize },
    #[error("coordinate {index} out of range for dimension {k}")]
    Coordinate { index: usize, k: usize },
    #[error("row selection must be nonempty")]
    EmptySelection,
    #[error("pattern does not factor over the claimed support")]
    NotAProduct,
    #[error("enumeration of {required} items exceeds budget {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("coordinate {index} does not split the intersection in half")]
    NoHalfSplit { index: usize },
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("sign assignment does not match the shape: {0}")]
    SignMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("search budget exhausted at depth {depth} with {nodes} nodes")]
    SearchBudget { depth: usize, nodes: usize },
}
