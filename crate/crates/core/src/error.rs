use thiserror::Error;

/// Errors shared by every algebraic module in the crate.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AlgebraError {
    /// Two operands do not live in the same truncated series ring.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// An operation required a series with zero constant term.
    #[error("nonzero constant term: {0}")]
    NonzeroConstantTerm(String),

    /// Division by a value that is zero at the available truncation order.
    #[error("zero or unresolvable denominator: {0}")]
    ZeroDenominator(String),

    /// A matrix did not satisfy a structural precondition.
    #[error("matrix shape error: {0}")]
    MatrixShape(String),

    /// Input to a nilpotent-only operation was not nilpotent.
    #[error("matrix is not nilpotent: {0}")]
    NotNilpotent(String),

    /// Eigenvalues were required exactly but are not available.
    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// The input lies on the boundary of the validity domain (for example a
    /// diagonal with eigenvalue coincidences beyond those forced by sigma).
    #[error("boundary input: {0}")]
    BoundaryInput(String),

    /// A configured resource budget was exceeded.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// Invalid user-supplied specification (sigma systems, parametrizations...).
    #[error("validation error: {0}")]
    Validation(String),

    /// Index out of range.
    #[error("index out of bounds: {0}")]
    IndexOutOfBounds(String),

    /// A square matrix required to be invertible is singular.
    #[error("singular matrix: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, AlgebraError>;
