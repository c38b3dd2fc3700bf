use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid weight sequence: {0}")]
    InvalidWeights(String),

    #[error("invalid cylinder: {0}")]
    InvalidCylinder(String),

    #[error("invalid isometry: {0}")]
    InvalidIsometry(String),

    #[error("cell budget exceeded: needed {needed} cells, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("inner products of sample pairs do not match (max violation {max_violation})")]
    GramMismatch { max_violation: f64 },

    #[error("point outside the span (residual {residual})")]
    OutsideSpan { residual: f64 },

    #[error("image escapes the unit cube at coordinate {coord}: value {value}")]
    EscapesCube { coord: usize, value: f64 },

    #[error("no feasible covering parameter: {0}")]
    Infeasible(String),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
