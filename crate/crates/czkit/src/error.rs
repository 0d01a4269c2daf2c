use thiserror::Error;

/// Errors reported by grid construction, norm evaluation, and operators.
#[derive(Debug, Error)]
pub enum CzError {
    #[error("grid size {0} is not a positive power of two")]
    GridSize(usize),

    #[error("non-finite sample at node {index} (x = {x}): {value}")]
    NonFiniteSample { index: usize, x: f64, value: f64 },

    #[error("value vector has length {got}, grid has {want} nodes")]
    LengthMismatch { got: usize, want: usize },

    #[error("functions live on different grids")]
    GridMismatch,

    #[error("cube [{left}, {right}] is not contained in the window [{lo}, {hi}]")]
    CubeOutsideWindow { left: f64, right: f64, lo: f64, hi: f64 },

    #[error("cube [{left}, {right}] contains no grid node")]
    EmptyCube { left: f64, right: f64 },

    #[error("kernel arity is {kernel} but {given} input functions were given")]
    ArityMismatch { kernel: usize, given: usize },

    #[error("kernel value is not finite at x = {x}, y = {y:?}")]
    NonFiniteKernel { x: f64, y: Vec<f64> },

    #[error("weight must be strictly positive (node {index} has value {value})")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("{0}")]
    InvalidParameter(String),

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv failure: {0}")]
    Csv(#[from] csv::Error),

    #[error("config parse failure: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, CzError>;

pub(crate) fn invalid(msg: impl Into<String>) -> CzError {
    CzError::InvalidParameter(msg.into())
}
