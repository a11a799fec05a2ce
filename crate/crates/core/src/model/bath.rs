use alloc::sync::Arc;
use core::f64::consts::PI;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue_hermitian, CMatrix};

/// Matrix-valued callback `ω ↦ M(ω)` over the coupling index.
pub type MatrixFn = Arc<dyn Fn(f64) -> CMatrix + Send + Sync>;

/// Spectral density `h_μν(ω)`.
#[derive(Clone)]
pub enum SpectralDensity {
    /// `h(ω) = γ·I`
    Flat { gamma: f64 },
    /// `h(ω) = 2πκ ω e^{−|ω|/ω_c} / (e^{βω} − 1)`, lifted diagonally, with
    /// `h(0) = 2πκ/β`. Energy-raising transitions (`ω > 0`) are suppressed
    /// by `e^{−βω}` relative to lowering ones.
    OhmicKms {
        kappa: f64,
        omega_c: f64,
        beta: f64,
    },
    Custom(MatrixFn),
}

/// Lamb-shift spectrum `ζ_μν(ω)`.
#[derive(Clone, Default)]
pub enum LambShiftSpectrum {
    #[default]
    Zero,
    /// `ζ(ω) = c·I`
    Constant(f64),
    Custom(MatrixFn),
}

impl fmt::Debug for SpectralDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralDensity::Flat { gamma } => f.debug_struct("Flat").field("gamma", gamma).finish(),
            SpectralDensity::OhmicKms {
                kappa,
                omega_c,
                beta,
            } => f
                .debug_struct("OhmicKms")
                .field("kappa", kappa)
                .field("omega_c", omega_c)
                .field("beta", beta)
                .finish(),
            SpectralDensity::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl fmt::Debug for LambShiftSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambShiftSpectrum::Zero => f.write_str("Zero"),
            LambShiftSpectrum::Constant(c) => f.debug_tuple("Constant").field(c).finish(),
            LambShiftSpectrum::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Bath data entering the generator: `h` and `ζ` over the coupling index.
#[derive(Clone, Debug)]
pub struct BathSpectrum {
    pub h: SpectralDensity,
    pub zeta: LambShiftSpectrum,
}

impl BathSpectrum {
    pub fn flat(gamma: f64) -> Self {
        BathSpectrum {
            h: SpectralDensity::Flat { gamma },
            zeta: LambShiftSpectrum::Zero,
        }
    }

    pub fn ohmic_kms(kappa: f64, omega_c: f64, beta: f64) -> Self {
        BathSpectrum {
            h: SpectralDensity::OhmicKms {
                kappa,
                omega_c,
                beta,
            },
            zeta: LambShiftSpectrum::Zero,
        }
    }

    pub fn custom(h: impl Fn(f64) -> CMatrix + Send + Sync + 'static) -> Self {
        BathSpectrum {
            h: SpectralDensity::Custom(Arc::new(h)),
            zeta: LambShiftSpectrum::Zero,
        }
    }

    pub fn with_zeta(mut self, zeta: LambShiftSpectrum) -> Self {
        self.zeta = zeta;
        self
    }
}

/// Scalar ohmic profile with the KMS factor.
pub fn ohmic_kms_profile(kappa: f64, omega_c: f64, beta: f64, omega: f64) -> f64 {
    if omega == 0.0 {
        return 2.0 * PI * kappa / beta;
    }
    2.0 * PI * kappa * omega * (-omega.abs() / omega_c).exp() / (beta * omega).exp_m1()
}

fn check_shape(m: &CMatrix, couplings: usize, context: &'static str) -> Result<()> {
    if m.shape() != (couplings, couplings) {
        return Err(Error::DimensionMismatch {
            context,
            expected: couplings,
            found: m.rows(),
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// `h_μν(ω)` for `couplings` coupling operators, checked PSD to `tol_psd`.
pub fn bath_h(bath: &BathSpectrum, omega: f64, couplings: usize, tol_psd: f64) -> Result<CMatrix> {
    if !omega.is_finite() {
        return Err(Error::NonFinite);
    }
    let not_psd = |min_eigenvalue| Error::NotPsd {
        index: alloc::vec::Vec::new(),
        omega,
        min_eigenvalue,
    };
    match &bath.h {
        SpectralDensity::Flat { gamma } => {
            if *gamma < -tol_psd {
                return Err(not_psd(*gamma));
            }
            Ok(CMatrix::identity(couplings).scale_real(*gamma))
        }
        SpectralDensity::OhmicKms {
            kappa,
            omega_c,
            beta,
        } => {
            let s = ohmic_kms_profile(*kappa, *omega_c, *beta, omega);
            if !s.is_finite() {
                return Err(Error::NonFinite);
            }
            if s < -tol_psd {
                return Err(not_psd(s));
            }
            Ok(CMatrix::identity(couplings).scale_real(s))
        }
        SpectralDensity::Custom(f) => {
            let m = f(omega);
            check_shape(&m, couplings, "spectral density")?;
            let scale = m.frobenius_norm().max(1.0);
            if m.hermitian_residual() > 1e-12 * scale {
                return Err(Error::NotHermitian {
                    residual: m.hermitian_residual() / scale,
                });
            }
            let min = min_eigenvalue_hermitian(&m)?;
            if min < -tol_psd {
                return Err(not_psd(min));
            }
            Ok(m)
        }
    }
}

/// `ζ_μν(ω)`, checked Hermitian to `tol_herm` (relative).
pub fn bath_zeta(
    bath: &BathSpectrum,
    omega: f64,
    couplings: usize,
    tol_herm: f64,
) -> Result<CMatrix> {
    match &bath.zeta {
        LambShiftSpectrum::Zero => Ok(CMatrix::zeros(couplings, couplings)),
        LambShiftSpectrum::Constant(c) => Ok(CMatrix::identity(couplings).scale_real(*c)),
        LambShiftSpectrum::Custom(f) => {
            let m = f(omega);
            check_shape(&m, couplings, "Lamb-shift spectrum")?;
            let residual = m.hermitian_residual();
            if residual > tol_herm * m.frobenius_norm().max(1.0) {
                return Err(Error::NotHermitianZeta { omega, residual });
            }
            Ok(m)
        }
    }
}

/// Principal-value transform `ζ(ω) = (1/2π) P∫ h(ν)/(ν − ω) dν` of a
/// scalar spectral density, the imaginary part of the one-sided transform
/// paired with `½h(ω)`.
///
/// Folds the integral to `∫₀^∞ (h(ω+u) − h(ω−u))/u du`, maps `[0, ∞)` to
/// `[0, 1)` and integrates with adaptive Simpson. `h` must decay faster
/// than `1/|ν|`.
pub fn principal_value_zeta(h: impl Fn(f64) -> f64, omega: f64, tol: f64) -> Result<f64> {
    let integrand = |s: f64| -> f64 {
        if s >= 1.0 {
            return 0.0;
        }
        let u = s / (1.0 - s);
        let jac = 1.0 / ((1.0 - s) * (1.0 - s));
        if u == 0.0 {
            // limit 2h'(ω), from a symmetric difference
            let e = 1e-6 * omega.abs().max(1.0);
            return (h(omega + e) - h(omega - e)) / e;
        }
        let v = (h(omega + u) - h(omega - u)) / u * jac;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut budget = 200_000usize;
    let a = 0.0;
    let b = 1.0;
    let fa = integrand(a);
    let fm = integrand(0.5);
    let fb = integrand(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let total = simpson(&integrand, a, b, fa, fm, fb, whole, tol, 50, &mut budget)?;
    Ok(total / (2.0 * PI))
}

#[allow(clippy::too_many_arguments)]
fn simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    budget: &mut usize,
) -> Result<f64> {
    if *budget == 0 {
        return Err(Error::NoConvergence {
            routine: "principal_value_zeta",
            iterations: 200_000,
        });
    }
    *budget -= 1;
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    Ok(
        simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, budget)?
            + simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, budget)?,
    )
}
