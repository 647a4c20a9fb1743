use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-unital element: leading coefficient {0} is not a nonzero constant")]
    NonUnital(String),
    #[error("truncation order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("wrong degree: {0}")]
    WrongDegree(String),
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("non-polynomial data: {0}")]
    NonPolynomial(String),
    #[error("x-dependent coefficients: {0}")]
    XDependent(String),
    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),
    #[error("denominator vanishes or changes sign on the validation grid: {0}")]
    DenominatorGuard(String),
    #[error("non-Poisson input: [pi,pi] = {0}")]
    NonPoisson(String),
    #[error("Maurer-Cartan residual nonzero: {0}")]
    NotMaurerCartan(String),
    #[error("degree condition violated: {0}")]
    DegreeViolation(String),
    #[error("obstruction not resolvable within bounds (D={degree}, R={order}) at order {at_order}: {residual}")]
    Obstruction { degree: u32, order: u32, at_order: usize, residual: String },
    #[error("closedness check failed: {0}")]
    ClosednessFailed(String),
    #[error("non-central classical curvature: {0}")]
    NonCentralCurvature(String),
    #[error("residual failure: {0}")]
    ResidualFailure(String),
    #[error("incompatible boundaries: {0}")]
    IncompatibleBoundaries(String),
    #[error("homotopy not contained in U: {0}")]
    NotContained(String),
    #[error("non-graph transversal map: {0}")]
    NonGraph(String),
    #[error("parse error at {line}:{column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unresolved reference: {0}")]
    Unresolved(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
