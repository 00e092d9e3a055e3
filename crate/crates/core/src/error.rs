use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An element, step or sequence does not match the declared ground sets.
    #[error("structural error: {0}")]
    Structure(String),

    /// The evaluator broke the normalized, non-negative objective contract.
    #[error("objective contract violated: {0}")]
    ObjectiveContract(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// An objective specification is malformed (negative weight, unknown item, bad matrix).
    #[error("invalid objective specification: {0}")]
    Spec(String),

    #[error("numerical failure at step {step}: {detail}")]
    Numerical { step: usize, detail: String },

    /// An exhaustive routine would exceed its configured work cap.
    #[error("capacity exceeded in {what}: needs {required}, cap is {limit}")]
    Capacity {
        what: &'static str,
        required: u128,
        limit: u128,
    },

    #[error("degenerate instance: {0}")]
    Degenerate(String),
}
