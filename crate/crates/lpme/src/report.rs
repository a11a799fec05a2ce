//! Serializable views of core results.

use serde::Serialize;

use lpme_core::analysis::{CptpCertificate, DecayFit, LimitCycle, SpectralClass, StabilityReport};
use lpme_core::bohr::CongruenceCheck;
use lpme_core::fourier::{FourierOperatorSeries, IndependenceCheck};
use lpme_core::generator::GeneratorBundle;
use lpme_core::linalg::C64;
use lpme_core::model::{SynthesizedHamiltonian, ValidationReport};
use lpme_core::Tolerances;

use crate::error::CliError;
use crate::schema::{matrix_to_rows, ComplexRows};

fn complex(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Serialize)]
pub struct TolerancesView {
    pub hermiticity: f64,
    pub cluster: f64,
    pub unitarity: f64,
    pub rational: f64,
    pub congruence: f64,
    pub search_box: i32,
    pub truncation_loss: f64,
    pub jump_drop: f64,
    pub psd: f64,
    pub spectral: f64,
    pub zero_eigenvalue: f64,
    pub conjugation: f64,
    pub condition_limit: f64,
    pub integrator: f64,
}

impl From<&Tolerances> for TolerancesView {
    fn from(t: &Tolerances) -> Self {
        TolerancesView {
            hermiticity: t.hermiticity,
            cluster: t.cluster,
            unitarity: t.unitarity,
            rational: t.rational,
            congruence: t.congruence,
            search_box: t.search_box,
            truncation_loss: t.truncation_loss,
            jump_drop: t.jump_drop,
            psd: t.psd,
            spectral: t.spectral,
            zero_eigenvalue: t.zero_eigenvalue,
            conjugation: t.conjugation,
            condition_limit: t.condition_limit,
            integrator: t.integrator,
        }
    }
}

#[derive(Serialize)]
pub struct CheckView<W> {
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<W>,
}

#[derive(Serialize)]
pub struct CongruenceWitness {
    pub omega: f64,
    pub omega_prime: f64,
    pub n: Vec<i32>,
}

#[derive(Serialize)]
pub struct ValidationView {
    pub passed: bool,
    pub rational_independence: CheckView<Vec<i32>>,
    pub p0_residual: f64,
    pub unitarity_residual: f64,
    pub unitarity_ok: bool,
    pub hermiticity_residual: f64,
    pub hermiticity_ok: bool,
    /// Absent when `H̄` could not be decomposed.
    pub congruence: Option<CheckView<CongruenceWitness>>,
    pub bohr_freqs: Vec<f64>,
    pub tolerances: TolerancesView,
}

impl From<&ValidationReport> for ValidationView {
    fn from(r: &ValidationReport) -> Self {
        let rational_independence = match &r.rational_independence {
            IndependenceCheck::Pass => CheckView { passed: true, witness: None },
            IndependenceCheck::Witness(k) => CheckView {
                passed: false,
                witness: Some(k.as_slice().to_vec()),
            },
        };
        let congruence = r.congruence.as_ref().map(|c| match c {
            CongruenceCheck::Pass => CheckView { passed: true, witness: None },
            CongruenceCheck::Witness { omega, omega_prime, n } => CheckView {
                passed: false,
                witness: Some(CongruenceWitness {
                    omega: *omega,
                    omega_prime: *omega_prime,
                    n: n.as_slice().to_vec(),
                }),
            },
        });
        ValidationView {
            passed: r.passed(),
            rational_independence,
            p0_residual: r.p0_residual,
            unitarity_residual: r.unitarity_residual,
            unitarity_ok: r.unitarity_ok(),
            hermiticity_residual: r.hermiticity_residual,
            hermiticity_ok: r.hermiticity_ok(),
            congruence,
            bohr_freqs: r.bohr_freqs.clone(),
            tolerances: (&r.tolerances).into(),
        }
    }
}

#[derive(Serialize)]
pub struct CoefficientView {
    pub n: Vec<i32>,
    pub matrix: ComplexRows,
}

#[derive(Serialize)]
pub struct SeriesView {
    pub r: usize,
    pub d: usize,
    pub truncation: i32,
    pub coefficients: Vec<CoefficientView>,
}

impl From<&FourierOperatorSeries> for SeriesView {
    fn from(s: &FourierOperatorSeries) -> Self {
        SeriesView {
            r: s.r(),
            d: s.d(),
            truncation: s.trunc(),
            coefficients: s
                .iter()
                .map(|(n, m)| CoefficientView {
                    n: n.as_slice().to_vec(),
                    matrix: matrix_to_rows(m),
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct HamiltonianView {
    pub tail: f64,
    pub series: SeriesView,
}

impl From<&SynthesizedHamiltonian> for HamiltonianView {
    fn from(h: &SynthesizedHamiltonian) -> Self {
        HamiltonianView {
            tail: h.tail,
            series: (&h.series).into(),
        }
    }
}

#[derive(Serialize)]
pub struct JumpView {
    pub mu: usize,
    pub n: Vec<i32>,
    pub omega: f64,
    pub operator: ComplexRows,
}

#[derive(Serialize)]
pub struct BlockView {
    pub omega: f64,
    pub n: Vec<i32>,
    pub shifted_frequency: f64,
    pub rates: ComplexRows,
    pub lamb: ComplexRows,
}

#[derive(Serialize)]
pub struct BundleView {
    pub quasienergies: Vec<f64>,
    pub bohr_freqs: Vec<f64>,
    pub projections: Vec<ComplexRows>,
    pub coupling_tail: f64,
    pub jumps: Vec<JumpView>,
    pub blocks: Vec<BlockView>,
    pub delta_h: ComplexRows,
    /// `X` acting on column-stacked density matrices.
    pub x: ComplexRows,
}

impl From<&GeneratorBundle> for BundleView {
    fn from(b: &GeneratorBundle) -> Self {
        BundleView {
            quasienergies: b.decomposition.quasienergies().to_vec(),
            bohr_freqs: b.decomposition.bohr_freqs().to_vec(),
            projections: b.decomposition.projections().iter().map(matrix_to_rows).collect(),
            coupling_tail: b.coupling_tail,
            jumps: b
                .jumps
                .iter()
                .map(|j| JumpView {
                    mu: j.mu,
                    n: j.n.as_slice().to_vec(),
                    omega: j.omega,
                    operator: matrix_to_rows(&j.op),
                })
                .collect(),
            blocks: b
                .blocks
                .iter()
                .map(|k| BlockView {
                    omega: k.omega,
                    n: k.n.as_slice().to_vec(),
                    shifted_frequency: k.shifted_frequency,
                    rates: matrix_to_rows(&k.rates),
                    lamb: matrix_to_rows(&k.lamb),
                })
                .collect(),
            delta_h: matrix_to_rows(&b.delta_h),
            x: matrix_to_rows(b.x.matrix()),
        }
    }
}

#[derive(Serialize)]
pub struct EigenvalueView {
    pub value: [f64; 2],
    pub class: &'static str,
}

fn class_name(c: SpectralClass) -> &'static str {
    match c {
        SpectralClass::Zero => "zero",
        SpectralClass::Oscillating => "oscillating",
        SpectralClass::Decaying => "decaying",
    }
}

#[derive(Serialize)]
pub struct SpectrumView {
    pub spectrum: Vec<EigenvalueView>,
    pub k0: usize,
    pub diagonalizable: bool,
    pub condition_number: f64,
    pub quasiperiodic_steady_state: bool,
    pub decay_rate: f64,
    pub slowest_decay_rate: f64,
    pub max_real_part: f64,
    pub zero_distance: f64,
    pub conjugation_residual: f64,
    pub invariant_state: Option<ComplexRows>,
    pub invariant_min_eigenvalue: Option<f64>,
}

impl From<&StabilityReport> for SpectrumView {
    fn from(r: &StabilityReport) -> Self {
        SpectrumView {
            spectrum: r
                .spectrum
                .iter()
                .zip(&r.classes)
                .map(|(z, c)| EigenvalueView {
                    value: complex(*z),
                    class: class_name(*c),
                })
                .collect(),
            k0: r.k0,
            diagonalizable: r.diagonalizable,
            condition_number: r.condition_number,
            quasiperiodic_steady_state: r.quasiperiodic_steady_state,
            decay_rate: r.decay_rate,
            slowest_decay_rate: r.slowest_decay_rate,
            max_real_part: r.max_real_part,
            zero_distance: r.zero_distance,
            conjugation_residual: r.conjugation_residual,
            invariant_state: r.invariant_state.as_ref().map(matrix_to_rows),
            invariant_min_eigenvalue: r.invariant_min_eigenvalue,
        }
    }
}

#[derive(Serialize)]
pub struct ComponentView {
    pub eigenvalue: [f64; 2],
    pub coefficient: [f64; 2],
}

#[derive(Serialize)]
pub struct StateView {
    pub t: f64,
    pub rho: ComplexRows,
}

#[derive(Serialize)]
pub struct FitView {
    pub rate: f64,
    pub window_start: f64,
    pub window_end: f64,
    pub points: usize,
    pub noise_floor: f64,
}

impl From<&DecayFit> for FitView {
    fn from(f: &DecayFit) -> Self {
        FitView {
            rate: f.rate,
            window_start: f.window_start,
            window_end: f.window_end,
            points: f.points,
            noise_floor: f.noise_floor,
        }
    }
}

#[derive(Serialize)]
pub struct LimitCycleView {
    pub quasiperiodic: bool,
    pub condition_number: f64,
    pub invariant: Vec<ComponentView>,
    pub oscillating: Vec<ComponentView>,
    pub transient: Vec<ComponentView>,
    pub slowest_present_rate: Option<f64>,
    pub transient_amplitude: f64,
    /// `None` when the transient is already below the noise floor.
    pub fit: Option<FitView>,
    pub states: Vec<StateView>,
}

impl LimitCycleView {
    pub fn new(cycle: &LimitCycle, fit: Option<&DecayFit>, grid: &[f64]) -> Self {
        let comps = |terms: &[lpme_core::analysis::CycleTerm]| {
            terms
                .iter()
                .map(|c| ComponentView {
                    eigenvalue: complex(c.eigenvalue),
                    coefficient: complex(c.coefficient),
                })
                .collect()
        };
        LimitCycleView {
            quasiperiodic: cycle.quasiperiodic,
            condition_number: cycle.condition_number,
            invariant: comps(&cycle.invariant),
            oscillating: comps(&cycle.oscillating),
            transient: comps(&cycle.transient),
            slowest_present_rate: cycle.slowest_present_rate(1e-12),
            transient_amplitude: cycle.transient_amplitude(),
            fit: fit.map(Into::into),
            states: grid
                .iter()
                .map(|&t| StateView {
                    t,
                    rho: matrix_to_rows(&cycle.at(t)),
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct CertificateEntryView {
    pub t: f64,
    pub s: Option<f64>,
    pub choi_min_eigenvalue: f64,
    pub trace_defect: f64,
    pub hermiticity_defect: f64,
    pub passed: bool,
}

#[derive(Serialize)]
pub struct CertificateView {
    pub passed: bool,
    pub worst_choi_min_eigenvalue: f64,
    pub worst_trace_defect: f64,
    pub worst_hermiticity_defect: f64,
    pub choi_threshold: f64,
    pub trace_threshold: f64,
    pub hermiticity_threshold: f64,
    pub entries: Vec<CertificateEntryView>,
}

impl From<&CptpCertificate> for CertificateView {
    fn from(c: &CptpCertificate) -> Self {
        CertificateView {
            passed: c.passed(),
            worst_choi_min_eigenvalue: c.worst_choi(),
            worst_trace_defect: c.worst_trace_defect(),
            worst_hermiticity_defect: c.worst_hermiticity_defect(),
            choi_threshold: c.thresholds.choi,
            trace_threshold: c.thresholds.trace,
            hermiticity_threshold: c.thresholds.hermiticity,
            entries: c
                .entries
                .iter()
                .map(|e| CertificateEntryView {
                    t: e.t,
                    s: e.s,
                    choi_min_eigenvalue: e.choi_min_eigenvalue,
                    trace_defect: e.trace_defect,
                    hermiticity_defect: e.hermiticity_defect,
                    passed: e.passed,
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct ErrorBody {
    pub kind: &'static str,
    pub message: String,
    pub exit_code: u8,
}

#[derive(Serialize)]
pub struct ErrorView {
    pub error: ErrorBody,
}

impl From<&CliError> for ErrorView {
    fn from(e: &CliError) -> Self {
        ErrorView {
            error: ErrorBody {
                kind: e.kind(),
                message: e.to_string(),
                exit_code: e.exit_code(),
            },
        }
    }
}
