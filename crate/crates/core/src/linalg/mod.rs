//! Dense complex linear algebra for small matrices and superoperators.

mod eigen;
mod expm;
mod matrix;
mod superop;

pub use eigen::{
    condition_number, eig_general, eig_hermitian, eigenvalues, inverse, min_eigenvalue_hermitian,
    schur, singular_values, solve, spectral_norm, trace_norm, GeneralEigen, HermitianEigen, Lu,
};
pub use expm::expm;
pub use matrix::{c64, pauli, CMatrix, CompensatedSum, C64, I, ONE, ZERO};
pub use superop::{ad_superop, choi_of, devectorize, vectorize, ChoiMatrix, Superoperator};
