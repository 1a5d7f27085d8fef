use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the domain of an operation (bad excitation number,
    /// negative coupling, detuning at or below -1, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A matrix handed to the eigensolver violates its contract.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("eigensolver failed to converge for eigenvalue {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },

    /// The closed-form eigenvector is undefined at vanishing coupling.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("ground-state search exhausted {max_blocks} blocks without the block minimum turning upward")]
    SearchFailed { max_blocks: usize },

    #[error("no level crossing between blocks {from} and {to}: {reason}")]
    NoCrossing { from: String, to: String, reason: String },

    #[error("critical couplings not strictly increasing: {first} (from {first_lambda}) >= {second} (from {second_lambda})")]
    NotIncreasing {
        first_lambda: String,
        first: f64,
        second_lambda: String,
        second: f64,
    },

    #[error("invalid two-qubit state: {0}")]
    InvalidState(String),

    /// A reference-table cell could not be computed.
    #[error("table {table}, row {row}, column {column}: {source}")]
    Cell {
        table: String,
        row: String,
        column: String,
        source: Box<Error>,
    },
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
