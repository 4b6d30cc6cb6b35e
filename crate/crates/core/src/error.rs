use alloc::string::String;

/// Errors raised by the matrix-function pipeline and its building blocks.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(&'static str),

    #[error("cannot parse {0:?} as a decimal number")]
    Parse(String),

    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("diagonal entry {index} is not one")]
    NonUnitDiagonal { index: usize },

    #[error("interpolation nodes {first} and {second} coincide")]
    CoincidentNodes { first: usize, second: usize },

    #[error("QR iteration did not converge after {iterations} iterations")]
    NotConverged { iterations: usize },

    #[error("spectrum is not real: diagonal entry {index} has imaginary part {imag:e}")]
    RealSpectrumViolation { index: usize, imag: f64 },

    #[error("cannot swap equal diagonal entries at position {index}")]
    EqualDiagonal { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown function {0:?}")]
    UnknownFunction(String),

    #[error("derivative of order {order} is not supported (max {max})")]
    DerivativeOrder { order: u32, max: u32 },

    #[error("infeasible experiment: {0}")]
    Infeasible(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
