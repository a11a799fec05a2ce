use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the engine.
///
/// Variants carry enough numeric context for the CLI to emit a
/// machine-readable report without re-running the failing check.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("matrix is not Hermitian (relative residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("{routine} did not converge within {iterations} iterations")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
    },
    #[error("non-finite intermediate in matrix exponential")]
    Overflow,
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("unitarity residual {residual:e} exceeds tolerance {tolerance:e}")]
    NotUnitary { residual: f64, tolerance: f64 },
    #[error("dropped Fourier tail {tail:e} exceeds threshold {threshold:e}")]
    TruncationLoss { tail: f64, threshold: f64 },
    #[error("rate matrix at n = {index:?}, omega = {omega} has eigenvalue {min_eigenvalue:e} < 0")]
    NotPsd {
        index: Vec<i32>,
        omega: f64,
        min_eigenvalue: f64,
    },
    #[error("Lamb-shift matrix zeta({omega}) is not Hermitian (residual {residual:e})")]
    NotHermitianZeta { omega: f64, residual: f64 },
    #[error("{omega} is not a Bohr quasi-frequency of the decomposition")]
    UnknownFrequency { omega: f64 },
    #[error("Bohr frequencies {omega} and {omega_prime} differ by n.Omega with n = {index:?}")]
    CongruenceViolation {
        omega: f64,
        omega_prime: f64,
        index: Vec<i32>,
    },
    #[error("propagator requested with s = {s} > t = {t}")]
    OrderViolation { t: f64, s: f64 },
    #[error("spectral certification failed: {0}")]
    SpectralViolation(String),
    #[error("generator is not diagonalizable (eigenvector condition number {condition_number:e})")]
    Defective { condition_number: f64 },
    #[error("distance to the limit cycle never decays over the supplied grid")]
    InsufficientDecay,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = core::result::Result<T, Error>;
