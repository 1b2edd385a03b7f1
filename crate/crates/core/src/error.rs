use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The evaluation budget is spent; the run must stop.
    #[error("evaluation budget exhausted after {used} evaluations")]
    BudgetExhausted { used: u64 },

    #[error("population of {available} cannot supply {needed} distinct donors")]
    InsufficientPopulation { needed: usize, available: usize },

    #[error("point lies outside the search domain at coordinate {index} (value {value})")]
    DomainViolation { index: usize, value: f64 },

    #[error("genome has dimension {actual}, problem expects {expected}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
