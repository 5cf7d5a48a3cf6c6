use thiserror::Error;

/// Errors raised by the symbolic kernel, the series algebra, the group actions
/// and the command-line front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by an expression whose normal form is zero")]
    ZeroDenominator,
    #[error("denominator evaluates below machine tolerance")]
    NearSingular,
    #[error("variable {0} is out of range for dimension {1}")]
    VariableOutOfRange(String, usize),
    #[error("variable {0} has no value at a second-order jet point")]
    UnboundVariable(String),
    #[error("substitution changes det(g) to a non-square; the radical w cannot be rebound")]
    RadicalSubstitution,
    #[error("series division by a non-unit (zero constant term)")]
    NonUnit,
    #[error("inner map must vanish at the basepoint")]
    BasepointMismatch,
    #[error("linear part of the map is singular")]
    NotInvertible,
    #[error("expression contains jet variables of order {found}, total derivative truncated at order {order}")]
    OrderOverflow { order: usize, found: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("image hypersurface is not a graph in the (u, x) chart (vertical tangent)")]
    NonAdmissible,
    #[error("image point leaves the affine chart lambda != 0")]
    ChartBoundary,
    #[error("vector is not on the light cone")]
    NotOnCone,
    #[error("matrix is not a rotation (orthogonal with determinant +1)")]
    NotRotation,
    #[error("matrix does not preserve the Minkowski form")]
    NotMoebius,
    #[error("dilation factor must be positive")]
    NonPositiveDilation,
    #[error("no conformal invariants exist for n = 1")]
    NoInvariants,
    #[error("conformal polynomial is not weighted-homogeneous")]
    NotHomogeneous,
    #[error("invariant polynomial is identically zero")]
    EmptyEquation,
    #[error("invariant symbol {symbol} is out of range for dimension {n}")]
    SymbolOutOfRange { symbol: String, n: usize },
    #[error("point lies outside the graph domain of the surface")]
    OutOfDomain,
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
