use thiserror::Error;

/// Errors raised by the linear-algebra primitives and the operator checks built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: ‖A − A*‖_F = {residual:e} exceeds {limit:e}")]
    NotHermitian { residual: f64, limit: f64 },
    #[error("matrix is not positive semidefinite: minimum eigenvalue {min_eigenvalue:e} below {limit:e}")]
    NotPsd { min_eigenvalue: f64, limit: f64 },
    #[error("{routine} did not converge")]
    NoConvergence { routine: &'static str },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operator must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("operator is not a contraction: ‖T‖ = {norm}")]
    NotContraction { norm: f64 },
    #[error("operator is not a 2-isometry: residual {residual:e}")]
    NotTwoIsometry { residual: f64 },
    #[error("covariance is zero (T*T = I within tolerance); no positive-covariance structure")]
    SigmaZero,
    #[error("block structure mismatch: {0}")]
    StructureMismatch(String),
    #[error("subspaces fail to span the ambient space: total rank {total} of {ambient}")]
    SpanMismatch { total: usize, ambient: usize },
    #[error("structure theorem violated: {0}")]
    TheoremViolation(String),
    #[error("operator is zero")]
    ZeroOperator,
    #[error("operator is not a {m}-quasi-isometry: residual {residual:e}")]
    NotQuasiIsometry { m: usize, residual: f64 },
    #[error("subspace is not invariant: ‖P⊥ T P‖ = {residual:e}")]
    NotInvariant { residual: f64 },
    #[error("the condition |T| ≤ |Re T| does not hold (defect {defect:e})")]
    ConditionFails { defect: f64 },
    #[error("generation of {kind} failed after {attempts} attempts")]
    GenerationFailed { kind: String, attempts: usize },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid tolerances: {0}")]
    InvalidTolerances(String),
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
