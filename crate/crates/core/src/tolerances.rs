/// Numerical thresholds shared across the engine.
///
/// Every check that compares a floating-point residual against zero reads
/// its threshold from here, so a single value object pins the behaviour of a
/// whole run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative Hermiticity residual accepted by the Hermitian eigensolver.
    pub hermiticity: f64,
    /// Relative gap below which quasienergies and Bohr frequencies merge.
    pub cluster: f64,
    /// Unitarity residual of p_t on the sample grid.
    pub unitarity: f64,
    /// Relative threshold on |k.Omega| for the rational-independence scan.
    pub rational: f64,
    /// Absolute threshold on |w - w' - n.Omega| for the congruence scan.
    pub congruence: f64,
    /// Half-width K of the integer box scanned by both number-theoretic checks.
    pub search_box: i32,
    /// Largest dropped Fourier tail accepted by series-producing operations.
    pub truncation_loss: f64,
    /// Jump operators with Frobenius norm below this are discarded.
    pub jump_drop: f64,
    /// Most negative eigenvalue tolerated in a Kossakowski block.
    pub psd: f64,
    /// Real parts with |Re| below this are snapped onto the imaginary axis.
    pub spectral: f64,
    /// Eigenvalues with modulus below this count as zero.
    pub zero_eigenvalue: f64,
    /// Matching distance for the complex-conjugation symmetry check.
    pub conjugation: f64,
    /// Largest eigenvector condition number treated as diagonalizable.
    pub condition_limit: f64,
    /// Target trace-norm agreement between successive integrator refinements.
    pub integrator: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermiticity: 1e-9,
            cluster: 1e-9,
            unitarity: 1e-9,
            rational: 1e-9,
            congruence: 1e-9,
            search_box: 12,
            truncation_loss: 1e-8,
            jump_drop: 1e-14,
            psd: 1e-12,
            spectral: 1e-9,
            zero_eigenvalue: 1e-10,
            conjugation: 1e-10,
            condition_limit: 1e6,
            integrator: 1e-9,
        }
    }
}
