use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("state is not normalized: squared norm {norm_sqr} (tolerance {tolerance:e})")]
    NotNormalized { norm_sqr: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix is not Hermitian at ({row}, {col}): |a_ij - conj(a_ji)| = {deviation:e}")]
    NotHermitian { row: usize, col: usize, deviation: f64 },

    #[error("trace {trace} is outside the admissible range")]
    Trace { trace: f64 },

    #[error("matrix is not positive semidefinite: minimum eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("imaginary residue {0:e} after a Hermitian sum")]
    ImaginaryResidue(f64),

    #[error("eigensolver did not converge: {0}")]
    Eigensolver(String),

    /// Two blocks of a dilation act on overlapping basis states.
    #[error("block supports overlap: {0}")]
    SupportOverlap(String),

    #[error("test state has weight {0:e} outside the operator support")]
    OutsideSupport(f64),

    #[error("invalid resource specification: {0}")]
    Spec(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
