//! Error type shared by all laboratory modules.

use thiserror::Error;

/// Errors produced by constructors and operations across the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    /// Grid parameters outside the supported desk-scale envelope.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    /// A field or sample vector does not match the expected shape.
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    /// Non-finite sample encountered where finite data is required.
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    /// Parameter outside its admissible range.
    #[error("invalid parameter {name}: {why}")]
    InvalidParameter { name: &'static str, why: String },
    /// An operation needs more derivatives than the symbol declares.
    #[error("derivative budget exceeded: requested {requested}, declared {declared}")]
    DerivativeBudget { requested: usize, declared: usize },
    /// A symbol limit at |x| -> oo was required but not declared.
    #[error("symbol declares no limit at |x| -> infinity")]
    MissingLimit,
    /// Ellipticity precondition failed; carries the witness point.
    #[error("symbol not elliptic: |det|*<xi>^(-ml) = {margin:.3e} at (x, xi) = ({x:?}, {xi:?})")]
    NotElliptic { margin: f64, x: Vec<f64>, xi: Vec<f64> },
    /// A pointwise matrix inverse failed (singular matrix value).
    #[error("singular matrix value at (x, xi) = ({x:?}, {xi:?})")]
    SingularValue { x: Vec<f64>, xi: Vec<f64> },
    /// Quadrature or extrapolation failed to converge to the requested tail.
    #[error("quadrature did not converge: {0}")]
    QuadratureDiverged(String),
    /// Linear-algebra backend failure.
    #[error("linear algebra error: {0}")]
    LinAlg(String),
    /// Denominator of a ratio diagnostic vanished.
    #[error("degenerate ratio: {0}")]
    DegenerateRatio(String),
}

pub type Result<T> = std::result::Result<T, Error>;
