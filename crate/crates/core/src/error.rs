use thiserror::Error;

/// Errors produced by the graph sampling toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("operator is not symmetric (max |A - A^T| = {max_asymmetry:e})")]
    NonSymmetric { max_asymmetry: f64 },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("expected a {expected} domain signal")]
    DomainMismatch { expected: &'static str },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("kernel `{name}` is not finite at lambda = {lambda}")]
    NonFiniteKernel { name: String, lambda: f64 },

    #[error("Chebyshev interval upper bound {upper} is below the operator's largest eigenvalue {lambda_max}")]
    IntervalTooSmall { upper: f64, lambda_max: f64 },

    #[error("sampling ratio {m} does not divide signal length {n}")]
    NotDivisible { n: usize, m: usize },

    #[error("invalid signal model: {0}")]
    ModelInvalid(String),

    #[error("iterative solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("linear system is singular: right-hand side has a component in the numerical null space")]
    SingularSystem,

    #[error("information matrix is singular for the given sampling set")]
    SingularInformationMatrix,

    #[error("distribution has {available} nodes with positive probability, {needed} requested")]
    InsufficientSupport { needed: usize, available: usize },

    #[error("budget {budget} exceeds the number of matrix entries {max}")]
    BudgetTooLarge { budget: usize, max: usize },

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}
