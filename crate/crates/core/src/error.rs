use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has zero dimension")]
    Empty,

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian: max |M - M^dag| = {residual:e}")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("state vector is zero")]
    ZeroVector,

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("spectrum is degenerate or unsorted: minimum gap {gap:e}")]
    DegenerateSpectrum { gap: f64 },

    #[error("closed form requires a qubit on A, got d_A = {d_a}")]
    NotQubit { d_a: usize },

    #[error("matrix is not unitary: max |U^dag U - I| = {residual:e}")]
    NotUnitary { residual: f64 },

    #[error("state is not pure: purity {purity}")]
    NotPure { purity: f64 },

    #[error("Kraus operators are not complete: max |sum M^dag M - I| = {residual:e}")]
    Incomplete { residual: f64 },

    #[error("dimension {dim} exceeds the enumeration limit {max}")]
    TooLarge { dim: usize, max: usize },

    #[error("W matrix has imaginary residue {residue:e}")]
    ComplexResidue { residue: f64 },

    #[error("precision chain violated: {0}")]
    ChainViolation(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}
