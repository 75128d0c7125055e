use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("field is not positive at {point:?} (value {value})")]
    NonPositive { point: Vec<f64>, value: f64 },

    #[error("point {0} lies outside the grid [{1}, {2}]")]
    OutsideGrid(f64, f64, f64),

    #[error("operator is not nonnegative on the grid: solution lost positivity near r = {0}")]
    NotNonnegative(f64),

    #[error("weight is singular at r = {0}")]
    Singular(f64),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("insufficient decay: tail mass ratio {0:e} exceeds 1e-8")]
    InsufficientDecay(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
