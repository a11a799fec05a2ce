//! The reduced model `(Ω, p_t, H̄, {S_μ}, bath)`, its validation, and
//! synthesis of the driving Hamiltonian `H_t = i ṗ p† + p H̄ p†`.

mod bath;

pub use bath::{
    bath_h, bath_zeta, ohmic_kms_profile, principal_value_zeta, BathSpectrum, LambShiftSpectrum,
    MatrixFn, SpectralDensity,
};

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bohr::{check_congruence_freedom, decompose_averaged_hamiltonian, CongruenceCheck};
use crate::error::{Error, Result};
use crate::fourier::{
    check_rational_independence, sample_times, series_adjoint, series_derivative,
    series_from_torus_samples, series_product_in_box, FourierOperatorSeries, FrequencyVector,
    IndependenceCheck, TorusFit,
};
use crate::linalg::{expm, CMatrix, C64, I};
use crate::tolerances::Tolerances;

/// Number of sample times used for grid checks on `p_t` and `H_t`.
pub const SAMPLE_GRID: usize = 64;

/// Unvalidated model data. Shapes are checked on construction; the
/// physical assumptions are checked by [`validate_model`].
#[derive(Clone, Debug)]
pub struct ReducedModel {
    omega: FrequencyVector,
    p_series: FourierOperatorSeries,
    h_bar: CMatrix,
    couplings: Vec<CMatrix>,
    bath: BathSpectrum,
}

impl ReducedModel {
    pub fn new(
        omega: FrequencyVector,
        p_series: FourierOperatorSeries,
        h_bar: CMatrix,
        couplings: Vec<CMatrix>,
        bath: BathSpectrum,
    ) -> Result<Self> {
        omega.require_r(p_series.r(), "model frequencies")?;
        let d = p_series.d();
        for m in core::iter::once(&h_bar).chain(&couplings) {
            if m.shape() != (d, d) {
                return Err(Error::DimensionMismatch {
                    context: "model operator",
                    expected: d,
                    found: m.rows(),
                });
            }
            if !m.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Ok(ReducedModel {
            omega,
            p_series,
            h_bar,
            couplings,
            bath,
        })
    }

    pub fn omega(&self) -> &FrequencyVector {
        &self.omega
    }

    pub fn p_series(&self) -> &FourierOperatorSeries {
        &self.p_series
    }

    pub fn h_bar(&self) -> &CMatrix {
        &self.h_bar
    }

    pub fn couplings(&self) -> &[CMatrix] {
        &self.couplings
    }

    pub fn bath(&self) -> &BathSpectrum {
        &self.bath
    }

    pub fn dim(&self) -> usize {
        self.p_series.d()
    }

    /// `p_t`
    pub fn p_at(&self, t: f64) -> CMatrix {
        self.p_series
            .evaluate(&self.omega, t)
            .expect("series and frequencies agree by construction")
    }

    pub fn with_bath(mut self, bath: BathSpectrum) -> Self {
        self.bath = bath;
        self
    }
}

/// Shape of a scalar drive profile `f(θ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileShape {
    /// `sin(kθ)`
    Sin,
    /// `cos(kθ) − 1`
    CosMinusOne,
}

/// One term `f(θ_axis)·G` of the exponent of `p̂(θ) = exp(−i Σ_j f_j(θ) G_j)`.
/// Both shapes vanish at `θ = 0`, so `p̂(0) = I`.
#[derive(Clone, Debug)]
pub struct GeneratorTerm {
    pub generator: CMatrix,
    pub axis: usize,
    pub amplitude: f64,
    pub harmonic: i32,
    pub shape: ProfileShape,
}

impl GeneratorTerm {
    pub fn profile(&self, theta: &[f64]) -> f64 {
        let x = self.harmonic as f64 * theta[self.axis];
        self.amplitude
            * match self.shape {
                ProfileShape::Sin => x.sin(),
                ProfileShape::CosMinusOne => x.cos() - 1.0,
            }
    }
}

/// Fourier series of `p̂(θ) = exp(−i Σ_j f_j(θ) G_j)` on the box `N`,
/// by sampling `2(2N+1)` points per axis.
pub fn p_series_from_generators(
    r: usize,
    d: usize,
    trunc: i32,
    terms: &[GeneratorTerm],
) -> Result<TorusFit> {
    for term in terms {
        if term.axis >= r {
            return Err(Error::InvalidInput(alloc::format!(
                "generator axis {} outside torus dimension {r}",
                term.axis
            )));
        }
        if term.generator.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                context: "drive generator",
                expected: d,
                found: term.generator.rows(),
            });
        }
        let res = term.generator.hermitian_residual();
        if res > 1e-12 * term.generator.frobenius_norm().max(1.0) {
            return Err(Error::NotHermitian { residual: res });
        }
    }
    series_from_torus_samples(r, d, trunc, |theta| {
        let mut exponent = CMatrix::zeros(d, d);
        for term in terms {
            exponent.add_scaled(C64::new(0.0, -term.profile(theta)), &term.generator);
        }
        expm(&exponent)
    })
}

/// Largest `‖p_t p_t† − I‖_F` over the default sample grid.
pub fn unitarity_residual_on_grid(p: &FourierOperatorSeries, omega: &FrequencyVector) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for t in sample_times(omega, SAMPLE_GRID) {
        worst = worst.max(p.evaluate(omega, t)?.unitarity_residual());
    }
    Ok(worst)
}

/// Driving Hamiltonian as a series, with the dropped product tail.
#[derive(Clone, Debug)]
pub struct SynthesizedHamiltonian {
    pub series: FourierOperatorSeries,
    pub tail: f64,
}

/// `H_t = i ṗ_t p_t† + p_t H̄ p_t†`.
///
/// Products are formed in the doubled box, which holds the full support
/// of a product of two box-`N` series, so the result is exact for the
/// given truncated `p`.
pub fn synthesize_hamiltonian(
    p: &FourierOperatorSeries,
    omega: &FrequencyVector,
    h_bar: &CMatrix,
    tols: &Tolerances,
) -> Result<SynthesizedHamiltonian> {
    omega.require_r(p.r(), "synthesize_hamiltonian")?;
    let residual = unitarity_residual_on_grid(p, omega)?;
    if residual > tols.unitarity {
        return Err(Error::NotUnitary {
            residual,
            tolerance: tols.unitarity,
        });
    }
    let trunc = 2 * p.trunc();
    let p_adj = series_adjoint(p);
    let dp = series_derivative(p, omega)?;
    let (kinetic, t1) = series_product_in_box(&dp, &p_adj, trunc)?;
    let hb = FourierOperatorSeries::constant(p.r(), h_bar.clone(), p.trunc());
    let (left, t2) = series_product_in_box(p, &hb, trunc)?;
    let (dressed, t3) = series_product_in_box(&left, &p_adj, trunc)?;
    let tail = (t1 * t1 + t2 * t2 + t3 * t3).sqrt();
    if tail > tols.truncation_loss {
        return Err(Error::TruncationLoss {
            tail,
            threshold: tols.truncation_loss,
        });
    }
    let series = dressed.add_scaled(I, &kinetic)?;
    Ok(SynthesizedHamiltonian { series, tail })
}

/// Outcome of every assumption check on a model.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub rational_independence: IndependenceCheck,
    /// `‖p_0 − I‖_F`
    pub p0_residual: f64,
    /// Largest `‖p_t p_t† − I‖_F` on the sample grid.
    pub unitarity_residual: f64,
    /// Relative `‖H̄ − H̄†‖_F / ‖H̄‖_F`.
    pub hermiticity_residual: f64,
    /// `None` when `H̄` could not be decomposed.
    pub congruence: Option<CongruenceCheck>,
    pub bohr_freqs: Vec<f64>,
    pub tolerances: Tolerances,
}

impl ValidationReport {
    pub fn rational_ok(&self) -> bool {
        self.rational_independence.passed()
    }

    pub fn unitarity_ok(&self) -> bool {
        self.p0_residual <= self.tolerances.unitarity
            && self.unitarity_residual <= self.tolerances.unitarity
    }

    pub fn hermiticity_ok(&self) -> bool {
        self.hermiticity_residual <= self.tolerances.hermiticity
    }

    pub fn congruence_ok(&self) -> bool {
        self.congruence.as_ref().is_some_and(CongruenceCheck::passed)
    }

    pub fn passed(&self) -> bool {
        self.rational_ok() && self.unitarity_ok() && self.hermiticity_ok() && self.congruence_ok()
    }
}

/// Runs the rational-independence, product-structure and congruence checks.
pub fn validate_model(m: &ReducedModel, tols: &Tolerances) -> ValidationReport {
    let rational_independence =
        check_rational_independence(&m.omega, tols.search_box, tols.rational);
    let p0_residual = (&m.p_at(0.0) - &CMatrix::identity(m.dim())).frobenius_norm();
    let unitarity_residual =
        unitarity_residual_on_grid(&m.p_series, &m.omega).unwrap_or(f64::INFINITY);
    let norm = m.h_bar.frobenius_norm();
    let hermiticity_residual = if norm > 0.0 {
        m.h_bar.hermitian_residual() / norm
    } else {
        0.0
    };
    let (congruence, bohr_freqs) =
        match decompose_averaged_hamiltonian(&m.h_bar, tols.hermiticity, tols.cluster) {
            Ok(dec) => (
                Some(check_congruence_freedom(
                    dec.bohr_freqs(),
                    &m.omega,
                    tols.search_box,
                    tols.congruence,
                )),
                dec.bohr_freqs().to_vec(),
            ),
            Err(_) => (None, Vec::new()),
        };
    ValidationReport {
        rational_independence,
        p0_residual,
        unitarity_residual,
        hermiticity_residual,
        congruence,
        bohr_freqs,
        tolerances: *tols,
    }
}
