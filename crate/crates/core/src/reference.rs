//! Small fixed models used by the tests, the acceptance suite and the CLI
//! fixtures.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Result;
use crate::fourier::{FourierOperatorSeries, FrequencyVector, DEFAULT_TRUNCATION};
use crate::linalg::{c64, pauli, CMatrix, C64};
use crate::model::{
    p_series_from_generators, BathSpectrum, GeneratorTerm, ProfileShape, ReducedModel,
};

fn frequencies(w: &[f64]) -> FrequencyVector {
    FrequencyVector::new(w.to_vec()).expect("positive constants")
}

fn sin_term(generator: CMatrix, axis: usize, amplitude: f64) -> GeneratorTerm {
    GeneratorTerm {
        generator,
        axis,
        amplitude,
        harmonic: 1,
        shape: ProfileShape::Sin,
    }
}

/// Qubit pure dephasing without drive: `H̄ = 0.35 σ_z`, `S = σ_z`, flat
/// rate 0.1, `Ω = (1, √2)`.
pub fn q1_dephasing() -> ReducedModel {
    ReducedModel::new(
        frequencies(&[1.0, 2f64.sqrt()]),
        FourierOperatorSeries::constant(2, CMatrix::identity(2), DEFAULT_TRUNCATION),
        pauli::z().scale_real(0.35),
        vec![pauli::z()],
        BathSpectrum::flat(0.1),
    )
    .expect("consistent shapes")
}

fn q2_with(omega: &[f64]) -> Result<ReducedModel> {
    let amplitudes = [0.3, 0.2];
    let terms: Vec<GeneratorTerm> = (0..omega.len())
        .map(|axis| sin_term(pauli::z(), axis, amplitudes[axis]))
        .collect();
    let fit = p_series_from_generators(omega.len(), 2, DEFAULT_TRUNCATION, &terms)?;
    ReducedModel::new(
        frequencies(omega),
        fit.series,
        pauli::z().scale_real(0.5),
        vec![pauli::x()],
        BathSpectrum::flat(0.1),
    )
}

/// Driven qubit `p_t = exp(−i(0.3 sin Ω₁t + 0.2 sin Ω₂t)σ_z)`,
/// `H̄ = 0.5 σ_z`, `S = σ_x`, flat rate 0.1, `Ω = (√2, π)`.
pub fn q2_driven_qubit() -> Result<ReducedModel> {
    q2_with(&[2f64.sqrt(), PI])
}

/// Single-frequency version of [`q2_driven_qubit`]: `Ω = (√2)`, drive
/// `0.3 sin Ω₁t` only.
pub fn q2_periodic() -> Result<ReducedModel> {
    q2_with(&[2f64.sqrt()])
}

/// [`q2_driven_qubit`] with `Ω = (1, √2)`: the Bohr gap 1 equals `Ω₁`,
/// so the Bohr frequencies are congruent.
pub fn q2_congruent() -> Result<ReducedModel> {
    q2_with(&[1.0, 2f64.sqrt()])
}

/// Averaged Hamiltonian of the qutrit models (nondegenerate).
pub fn qutrit_h_bar() -> CMatrix {
    CMatrix::from_rows(&[
        [c64(0.9, 0.0), c64(0.2, -0.1), c64(0.0, 0.05)],
        [c64(0.2, 0.1), c64(0.1, 0.0), c64(0.3, 0.0)],
        [c64(0.0, -0.05), c64(0.3, 0.0), c64(-0.7, 0.0)],
    ])
}

/// Coupling operators of the qutrit models.
pub fn qutrit_couplings() -> Vec<CMatrix> {
    vec![
        CMatrix::from_real_rows(&[[0.0, 0.5, 0.0], [0.5, 0.0, 0.5], [0.0, 0.5, 0.0]]),
        CMatrix::from_rows(&[
            [c64(0.3, 0.0), c64(0.0, -0.2), c64(0.1, 0.0)],
            [c64(0.0, 0.2), c64(-0.1, 0.0), c64(0.4, 0.0)],
            [c64(0.1, 0.0), c64(0.4, 0.0), c64(-0.2, 0.0)],
        ]),
    ]
}

/// Drive generators of the qutrit model.
pub fn qutrit_drive_generators() -> [CMatrix; 2] {
    [
        CMatrix::from_rows(&[
            [c64(0.4, 0.0), c64(0.3, -0.2), c64(0.0, 0.1)],
            [c64(0.3, 0.2), c64(-0.1, 0.0), c64(0.25, 0.0)],
            [c64(0.0, -0.1), c64(0.25, 0.0), c64(-0.3, 0.0)],
        ]),
        CMatrix::from_rows(&[
            [c64(-0.2, 0.0), c64(0.1, 0.3), c64(0.2, 0.0)],
            [c64(0.1, -0.3), c64(0.35, 0.0), c64(0.0, -0.15)],
            [c64(0.2, 0.0), c64(0.0, 0.15), c64(-0.15, 0.0)],
        ]),
    ]
}

/// Ohmic bath of the qutrit models: `κ = 0.05`, `ω_c = 3`, `β = 1.5`.
pub fn qutrit_bath() -> BathSpectrum {
    BathSpectrum::ohmic_kms(0.05, 3.0, QUTRIT_BETA)
}

pub const QUTRIT_BETA: f64 = 1.5;

/// Driven qutrit with two couplings and an ohmic KMS bath, `Ω = (1, √2)`,
/// `p̂(θ) = exp(−i(0.3 sin θ₁ G₁ + 0.25 sin θ₂ G₂))`.
pub fn q3_qutrit() -> Result<ReducedModel> {
    let [g1, g2] = qutrit_drive_generators();
    let fit = p_series_from_generators(
        2,
        3,
        DEFAULT_TRUNCATION,
        &[sin_term(g1, 0, 0.3), sin_term(g2, 1, 0.25)],
    )?;
    ReducedModel::new(
        frequencies(&[1.0, 2f64.sqrt()]),
        fit.series,
        qutrit_h_bar(),
        qutrit_couplings(),
        qutrit_bath(),
    )
}

/// [`q3_qutrit`] without drive (`p ≡ I`).
pub fn q3_static() -> ReducedModel {
    ReducedModel::new(
        frequencies(&[1.0, 2f64.sqrt()]),
        FourierOperatorSeries::constant(2, CMatrix::identity(3), DEFAULT_TRUNCATION),
        qutrit_h_bar(),
        qutrit_couplings(),
        qutrit_bath(),
    )
    .expect("consistent shapes")
}

/// Undriven qubit whose generator has exactly two decay rates: population
/// relaxation at 0.1 (`σ_x` coupling, lowering only) and coherence decay
/// at 1.0 (adding `σ_z` dephasing at 0.475). `Ω = (√2, π)`.
pub fn two_mode_qubit() -> ReducedModel {
    let bath = BathSpectrum::custom(|w| {
        CMatrix::diag(&[C64::new(if w < 0.0 { 0.1 } else { 0.0 }, 0.0), C64::new(0.475, 0.0)])
    });
    ReducedModel::new(
        frequencies(&[2f64.sqrt(), PI]),
        FourierOperatorSeries::constant(2, CMatrix::identity(2), DEFAULT_TRUNCATION),
        pauli::z().scale_real(0.5),
        vec![pauli::x(), pauli::z()],
        bath,
    )
    .expect("consistent shapes")
}

/// A full-rank density matrix with nonzero coherences.
pub fn generic_state(d: usize) -> CMatrix {
    let a = CMatrix::from_fn(d, d, |i, j| {
        let k = (i * d + j) as f64;
        c64((1.3 * k + 0.4).sin() + if i == j { 1.5 } else { 0.0 }, (0.7 * k + 1.1).cos() * 0.6)
    });
    let rho = &a * &a.adjoint();
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr)
}
