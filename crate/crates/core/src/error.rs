use thiserror::Error;

/// Failures raised by the decomposition and tetrablock routines.
///
/// Variants fall into three families: malformed input (`Input`,
/// `DimensionMismatch`, `NonFinite`, `Size`), violated mathematical
/// preconditions (`NotAContraction`, `NotCommuting`, ...), and failed
/// post-condition checks that carry the offending residual.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("dimension {dim} exceeds cap {cap}")]
    Size { dim: usize, cap: usize },

    #[error("operator {index} is not a contraction: norm {norm:.3e} exceeds 1 + {tol:.3e}")]
    NotAContraction { index: usize, norm: f64, tol: f64 },

    #[error("operator is not an isometry: |V*V - I| = {residual:.3e} > {tol:.3e}")]
    NotAnIsometry { residual: f64, tol: f64 },

    #[error("operators {i} and {j} do not commute: residual {residual:.3e}")]
    NotCommuting { i: usize, j: usize, residual: f64 },

    #[error("operators {i} and {j} do not doubly commute: residual {residual:.3e}")]
    NotDoublyCommuting { i: usize, j: usize, residual: f64 },

    #[error("operator {index} is not completely non-unitary")]
    NotCnu { index: usize },

    #[error("{what}: subspace is not reducing (residual {residual:.3e} > {tol:.3e})")]
    NotReducing { what: String, residual: f64, tol: f64 },

    #[error("triple is not an E-contraction: {what} (residual {residual:.3e})")]
    NotAnEContraction { what: String, residual: f64 },

    #[error("reducing-core iteration did not stabilise within {cap} steps")]
    IterationCap { cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
