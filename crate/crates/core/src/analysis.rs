//! Spectral stability of `X`, the limit cycle `ρ_t^∞`, decay-rate fits and
//! CPTP certificates for the product-form map.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{DynamicalMap, GeneratorEigen};
use crate::error::{Error, Result};
use crate::linalg::{
    choi_of, devectorize, min_eigenvalue_hermitian, trace_norm, vectorize, CMatrix, Superoperator,
    C64,
};
use crate::tolerances::Tolerances;

/// Class of an eigenvalue of `X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralClass {
    Zero,
    /// Purely imaginary, nonzero.
    Oscillating,
    /// Strictly negative real part.
    Decaying,
}

/// Classified spectrum of `X`.
#[derive(Clone, Debug)]
pub struct StabilityReport {
    /// Eigenvalues with real parts below the tolerance snapped to zero.
    pub spectrum: Vec<C64>,
    pub classes: Vec<SpectralClass>,
    pub condition_number: f64,
    pub diagonalizable: bool,
    /// Multiplicity of the eigenvalue zero.
    pub k0: usize,
    /// True iff there are no nonzero purely imaginary eigenvalues.
    pub quasiperiodic_steady_state: bool,
    /// Largest `|Re ξ|` over decaying eigenvalues (zero if there are none).
    pub decay_rate: f64,
    /// Smallest `|Re ξ|` over decaying eigenvalues (zero if there are none).
    pub slowest_decay_rate: f64,
    /// Largest real part before snapping.
    pub max_real_part: f64,
    /// Distance from zero of the eigenvalue closest to it.
    pub zero_distance: f64,
    /// Largest distance between an eigenvalue and its matched conjugate.
    pub conjugation_residual: f64,
    /// Projection of `I/d` onto the kernel of `X` along the other
    /// eigenspaces; PSD for a CPTP semigroup.
    pub invariant_state: Option<CMatrix>,
    pub invariant_min_eigenvalue: Option<f64>,
    pub eigen: Option<GeneratorEigen>,
}

impl StabilityReport {
    pub fn indices(&self, class: SpectralClass) -> impl Iterator<Item = usize> + '_ {
        self.classes
            .iter()
            .enumerate()
            .filter(move |(_, c)| **c == class)
            .map(|(i, _)| i)
    }

    pub fn oscillating(&self) -> Vec<C64> {
        self.indices(SpectralClass::Oscillating).map(|i| self.spectrum[i]).collect()
    }

    pub fn decaying(&self) -> Vec<C64> {
        self.indices(SpectralClass::Decaying).map(|i| self.spectrum[i]).collect()
    }
}

/// Diagonalizes `X`, snaps real parts within `tols.spectral` onto the
/// imaginary axis and checks the three structural properties: no real
/// part above the tolerance, `0` in the spectrum, and closure under
/// complex conjugation.
pub fn spectrum_classification(x: &Superoperator, tols: &Tolerances) -> Result<StabilityReport> {
    let eigen = GeneratorEigen::new(x)?;
    let raw = eigen.values.clone();

    let max_real_part = raw.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    if max_real_part > tols.spectral {
        return Err(Error::SpectralViolation(format!(
            "eigenvalue with real part {max_real_part:e} in the right half-plane"
        )));
    }
    let zero_distance = raw.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if zero_distance > tols.zero_eigenvalue {
        return Err(Error::SpectralViolation(format!(
            "0 is not an eigenvalue (closest at distance {zero_distance:e})"
        )));
    }
    let conjugation_residual = conjugation_mismatch(&raw);
    if conjugation_residual > tols.conjugation {
        return Err(Error::SpectralViolation(format!(
            "spectrum not closed under conjugation (mismatch {conjugation_residual:e})"
        )));
    }

    let spectrum: Vec<C64> = raw
        .iter()
        .map(|z| {
            if z.re.abs() < tols.spectral {
                C64::new(0.0, z.im)
            } else {
                *z
            }
        })
        .collect();
    let classes: Vec<SpectralClass> = spectrum
        .iter()
        .map(|z| {
            if z.norm() < tols.zero_eigenvalue {
                SpectralClass::Zero
            } else if z.re == 0.0 {
                SpectralClass::Oscillating
            } else {
                SpectralClass::Decaying
            }
        })
        .collect();
    let k0 = classes.iter().filter(|c| **c == SpectralClass::Zero).count();
    let decay: Vec<f64> = spectrum
        .iter()
        .zip(&classes)
        .filter(|(_, c)| **c == SpectralClass::Decaying)
        .map(|(z, _)| z.re.abs())
        .collect();
    let decay_rate = decay.iter().copied().fold(0.0, f64::max);
    let slowest_decay_rate = decay.iter().copied().fold(f64::INFINITY, f64::min);
    let slowest_decay_rate = if slowest_decay_rate.is_finite() {
        slowest_decay_rate
    } else {
        0.0
    };
    let diagonalizable = eigen.condition_number < tols.condition_limit;

    let (invariant_state, invariant_min_eigenvalue) = if diagonalizable {
        let d = x.dim();
        let seed = CMatrix::identity(d).scale_real(1.0 / d as f64);
        let state = project(&eigen, &classes, &seed, |c| c == SpectralClass::Zero)?.hermitian_part();
        let min = min_eigenvalue_hermitian(&state)?;
        (Some(state), Some(min))
    } else {
        (None, None)
    };

    let quasiperiodic_steady_state = !classes_contains(&classes, SpectralClass::Oscillating);
    Ok(StabilityReport {
        spectrum,
        classes,
        condition_number: eigen.condition_number,
        diagonalizable,
        k0,
        quasiperiodic_steady_state,
        decay_rate,
        slowest_decay_rate,
        max_real_part,
        zero_distance,
        conjugation_residual,
        invariant_state,
        invariant_min_eigenvalue,
        eigen: Some(eigen),
    })
}

fn classes_contains(classes: &[SpectralClass], c: SpectralClass) -> bool {
    classes.contains(&c)
}

/// Greedy matching of each eigenvalue with the conjugate of another;
/// returns the worst matched distance.
fn conjugation_mismatch(values: &[C64]) -> f64 {
    let mut used = alloc::vec![false; values.len()];
    let mut worst: f64 = 0.0;
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].im.abs().total_cmp(&values[a].im.abs()));
    for &i in &order {
        if used[i] {
            continue;
        }
        used[i] = true;
        let target = values[i].conj();
        // a (numerically) real eigenvalue is its own partner
        let own = 2.0 * values[i].im.abs();
        let best = (0..values.len())
            .filter(|&j| !used[j])
            .map(|j| (j, (values[j] - target).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((j, dist)) if dist < own => {
                used[j] = true;
                worst = worst.max(dist);
            }
            _ => worst = worst.max(own),
        }
    }
    worst
}

/// Spectral projection of `rho` onto the eigenvectors whose class passes
/// `keep`.
fn project(
    eigen: &GeneratorEigen,
    classes: &[SpectralClass],
    rho: &CMatrix,
    keep: impl Fn(SpectralClass) -> bool,
) -> Result<CMatrix> {
    let coeffs = eigen.inverse.mul_vec(&vectorize(rho)?);
    let n = coeffs.len();
    let mut v = alloc::vec![C64::new(0.0, 0.0); n];
    for (j, c) in coeffs.iter().enumerate() {
        if keep(classes[j]) {
            for (i, vi) in v.iter_mut().enumerate() {
                *vi += eigen.vectors[(i, j)] * c;
            }
        }
    }
    devectorize(&v)
}

/// One retained eigencomponent `c_j φ_j` oscillating at `frequency`.
#[derive(Clone, Debug)]
pub struct CycleTerm {
    pub eigenvalue: C64,
    pub coefficient: C64,
    /// `φ_j` as a matrix (unit-norm eigenvector of `X`).
    pub mode: CMatrix,
}

/// `ρ_t^∞ = Σ_t(Σ_{ξ=0} c φ + Σ_{ξ∈M₁} c e^{i Im ξ t} φ)`.
#[derive(Clone, Debug)]
pub struct LimitCycle {
    pub invariant: Vec<CycleTerm>,
    pub oscillating: Vec<CycleTerm>,
    /// Decaying components dropped from the cycle.
    pub transient: Vec<CycleTerm>,
    pub quasiperiodic: bool,
    pub condition_number: f64,
    map: DynamicalMap,
}

impl LimitCycle {
    /// Inside the rotating frame, before `Σ_t`.
    pub fn reduced_state(&self, t: f64) -> CMatrix {
        let d = self.map.dim();
        let mut out = CMatrix::zeros(d, d);
        for term in &self.invariant {
            out.add_scaled(term.coefficient, &term.mode);
        }
        for term in &self.oscillating {
            out.add_scaled(term.coefficient * C64::new(0.0, term.eigenvalue.im * t).exp(), &term.mode);
        }
        out
    }

    /// `ρ_t^∞`
    pub fn at(&self, t: f64) -> CMatrix {
        let inner = self.reduced_state(t);
        let p = self.map.model().p_at(t);
        &(&p * &inner) * &p.adjoint()
    }

    /// `A = Σ_{M₂} |c_j| ‖φ_j‖₁`, the prefactor of the decay bound.
    pub fn transient_amplitude(&self) -> f64 {
        self.transient
            .iter()
            .map(|t| t.coefficient.norm() * trace_norm(&t.mode))
            .sum()
    }

    /// Smallest `|Re ξ|` among decaying components with weight above
    /// `threshold`, i.e. the rate that governs the asymptotic approach.
    pub fn slowest_present_rate(&self, threshold: f64) -> Option<f64> {
        self.transient
            .iter()
            .filter(|t| t.coefficient.norm() * trace_norm(&t.mode) > threshold)
            .map(|t| t.eigenvalue.re.abs())
            .min_by(f64::total_cmp)
    }
}

/// Expands `ρ₀` in the eigenbasis of `X` and keeps the non-decaying part.
pub fn limit_cycle(map: &DynamicalMap, rho0: &CMatrix) -> Result<LimitCycle> {
    let tols = *map.tolerances();
    let report = spectrum_classification(&map.bundle().x, &tols)?;
    if !report.diagonalizable {
        return Err(Error::Defective {
            condition_number: report.condition_number,
        });
    }
    let eigen = report.eigen.as_ref().expect("set by classification");
    let coeffs = eigen.inverse.mul_vec(&vectorize(rho0)?);
    let mut invariant = Vec::new();
    let mut oscillating = Vec::new();
    let mut transient = Vec::new();
    for (j, c) in coeffs.into_iter().enumerate() {
        let term = CycleTerm {
            eigenvalue: report.spectrum[j],
            coefficient: c,
            mode: devectorize(&eigen.vectors.column(j))?,
        };
        match report.classes[j] {
            SpectralClass::Zero => invariant.push(term),
            SpectralClass::Oscillating => oscillating.push(term),
            SpectralClass::Decaying => transient.push(term),
        }
    }
    Ok(LimitCycle {
        invariant,
        oscillating,
        transient,
        quasiperiodic: report.quasiperiodic_steady_state,
        condition_number: report.condition_number,
        map: map.clone(),
    })
}

/// Least-squares fit of `log ‖Λ_t(ρ₀) − ρ_t^∞‖₁` against `t`.
#[derive(Clone, Debug)]
pub struct DecayFit {
    /// Minus the fitted slope.
    pub rate: f64,
    pub window_start: f64,
    pub window_end: f64,
    pub points: usize,
    /// `(t, distance)` over the whole grid.
    pub distances: Vec<(f64, f64)>,
    pub noise_floor: f64,
}

/// Fits the asymptotic decay rate towards the limit cycle.
///
/// The window opens at the first grid time where the distance is below a
/// tenth of its initial value and closes at the last time where it is
/// still above a hundred times the round-off floor
/// `ε · cond(V) · ‖ρ₀‖₁ · d²`.
pub fn decay_rate_fit(
    map: &DynamicalMap,
    cycle: &LimitCycle,
    rho0: &CMatrix,
    grid: &[f64],
) -> Result<DecayFit> {
    let d = map.dim() as f64;
    let noise_floor = f64::EPSILON * cycle.condition_number * trace_norm(rho0) * d * d;
    let mut distances = Vec::with_capacity(grid.len());
    for &t in grid {
        let rho = map.evolve(rho0, t)?;
        distances.push((t, trace_norm(&(&rho - &cycle.at(t)))));
    }
    let initial = distances.first().map_or(0.0, |x| x.1);
    if distances.iter().all(|&(_, v)| v >= 1e-3) {
        return Err(Error::InsufficientDecay);
    }
    let start = distances.iter().position(|&(_, v)| v < 0.1 * initial);
    let end = distances.iter().rposition(|&(_, v)| v > 100.0 * noise_floor);
    let (start, end) = match (start, end) {
        (Some(s), Some(e)) if e >= s + 2 => (s, e),
        _ => return Err(Error::InsufficientDecay),
    };
    let window = &distances[start..=end];
    let n = window.len() as f64;
    let mean_t = window.iter().map(|x| x.0).sum::<f64>() / n;
    let mean_y = window.iter().map(|x| x.1.ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(t, v) in window {
        sxy += (t - mean_t) * (v.ln() - mean_y);
        sxx += (t - mean_t) * (t - mean_t);
    }
    Ok(DecayFit {
        rate: -sxy / sxx,
        window_start: window[0].0,
        window_end: window[window.len() - 1].0,
        points: window.len(),
        distances,
        noise_floor,
    })
}

/// Thresholds for a CPTP certificate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertificateThresholds {
    pub choi: f64,
    pub trace: f64,
    pub hermiticity: f64,
}

impl Default for CertificateThresholds {
    fn default() -> Self {
        CertificateThresholds {
            choi: 1e-10,
            trace: 1e-12,
            hermiticity: 1e-12,
        }
    }
}

/// Checks for one map `Λ_t` (`s = None`) or propagator `Λ_{t,s}`.
#[derive(Clone, Debug)]
pub struct CertificateEntry {
    pub t: f64,
    pub s: Option<f64>,
    pub choi_min_eigenvalue: f64,
    pub trace_defect: f64,
    pub hermiticity_defect: f64,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct CptpCertificate {
    pub entries: Vec<CertificateEntry>,
    pub thresholds: CertificateThresholds,
}

impl CptpCertificate {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn worst_choi(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.choi_min_eigenvalue)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn worst_trace_defect(&self) -> f64 {
        self.entries.iter().map(|e| e.trace_defect).fold(0.0, f64::max)
    }

    pub fn worst_hermiticity_defect(&self) -> f64 {
        self.entries.iter().map(|e| e.hermiticity_defect).fold(0.0, f64::max)
    }
}

fn certify_one(
    s: &Superoperator,
    t: f64,
    start: Option<f64>,
    probes: &[CMatrix],
    th: &CertificateThresholds,
) -> Result<CertificateEntry> {
    let choi = choi_of(s);
    let choi_min_eigenvalue = choi.min_eigenvalue();
    let trace_defect = choi.trace_preservation_defect();
    let mut hermiticity_defect: f64 = 0.0;
    for h in probes {
        let image = s.apply(h)?;
        hermiticity_defect = hermiticity_defect.max(image.hermitian_residual());
    }
    Ok(CertificateEntry {
        t,
        s: start,
        choi_min_eigenvalue,
        trace_defect,
        hermiticity_defect,
        passed: choi_min_eigenvalue >= -th.choi
            && trace_defect <= th.trace
            && hermiticity_defect <= th.hermiticity,
    })
}

fn random_hermitian(rng: &mut impl Rng, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .hermitian_part()
}

/// Certifies `Λ_t` at every sample time and `Λ_{t,s}` at `pairs` random
/// ordered pairs drawn from `[0, max(t_samples)]` with the given seed.
pub fn cptp_certificate(
    map: &DynamicalMap,
    t_samples: &[f64],
    pairs: usize,
    seed: u64,
    thresholds: CertificateThresholds,
) -> Result<CptpCertificate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = map.dim();
    let probes: Vec<CMatrix> = (0..3).map(|_| random_hermitian(&mut rng, d)).collect();
    let mut entries = Vec::with_capacity(t_samples.len() + pairs);
    for &t in t_samples {
        entries.push(certify_one(&map.at(t)?, t, None, &probes, &thresholds)?);
    }
    let horizon = t_samples.iter().copied().fold(0.0, f64::max);
    if horizon > 0.0 {
        for _ in 0..pairs {
            let a = rng.gen_range(0.0..horizon);
            let b = rng.gen_range(0.0..horizon);
            let (s, t) = if a <= b { (a, b) } else { (b, a) };
            entries.push(certify_one(&map.propagator(t, s)?, t, Some(s), &probes, &thresholds)?);
        }
    }
    Ok(CptpCertificate {
        entries,
        thresholds,
    })
}

/// `n` logarithmically spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}
