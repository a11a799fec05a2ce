//! Checks shared by the acceptance runner and the integration tests.

#![allow(dead_code)]

use std::time::Instant;

use lpme_core::analysis::{
    cptp_certificate, decay_rate_fit, limit_cycle, log_grid, spectrum_classification,
    CertificateThresholds, SpectralClass,
};
use lpme_core::bohr::{interaction_picture_coupling_series, q_omega_apply};
use lpme_core::dynamics::{
    integrate_mme_direct, integrate_schrodinger, uniform_grid, DynamicalMap,
    TimeDependentLindbladian,
};
use lpme_core::fourier::MultiIndex;
use lpme_core::generator::{
    build_generator, build_generator_from_jumps, check_covariance, cross_check_selection_rule,
    dissipator_from_blocks, prepare_jumps, assemble_x, GeneratorBundle,
};
use lpme_core::linalg::{expm, trace_norm, CMatrix, C64, I};
use lpme_core::model::{
    synthesize_hamiltonian, validate_model, BathSpectrum, LambShiftSpectrum, ReducedModel,
};
use lpme_core::reference::generic_state;
use lpme_core::{Result, Tolerances};

pub struct Check {
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(pass: bool, detail: String) -> Self {
        Check { pass, detail }
    }
}

/// Folds several named sub-checks into one.
pub fn all(parts: Vec<(String, Check)>) -> Check {
    let pass = parts.iter().all(|(_, c)| c.pass);
    let detail = parts
        .iter()
        .map(|(name, c)| format!("{name}: {}{}", if c.pass { "" } else { "FAIL " }, c.detail))
        .collect::<Vec<_>>()
        .join("; ");
    Check { pass, detail }
}

pub fn tols() -> Tolerances {
    Tolerances::default()
}

/// Adds a smooth odd Lamb-shift profile so that `ΔH ≠ 0`.
pub fn with_lamb_shift(m: ReducedModel) -> ReducedModel {
    let k = m.couplings().len();
    let bath = m.bath().clone().with_zeta(LambShiftSpectrum::Custom(std::sync::Arc::new(
        move |w: f64| CMatrix::identity(k).scale_real(0.05 * w / (1.0 + w * w)),
    )));
    m.with_bath(bath)
}

/// Schrödinger oracle: `‖u_t − p_t e^{−iH̄t}‖_F` over `[0, 20]`.
pub fn reduction_oracle(m: &ReducedModel) -> Result<Check> {
    let start = Instant::now();
    let h = synthesize_hamiltonian(m.p_series(), m.omega(), m.h_bar(), &tols())?;
    let grid = uniform_grid(0.0, 20.0, 201);
    let traj = integrate_schrodinger(&h.series.pruned(1e-15), m.omega(), &grid, 1e-11)?;
    let mut worst: f64 = 0.0;
    for (t, u) in grid.iter().zip(&traj.states) {
        let expected = &m.p_at(*t) * &expm(&m.h_bar().scale(-I * *t))?;
        worst = worst.max((u - &expected).frobenius_norm());
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(Check::new(
        worst <= 1e-8,
        format!("max ‖u_t − p_t e^(−iH̄t)‖ = {worst:.2e}, {secs:.2}s"),
    ))
}

/// Product form versus direct integration on 200 points up to `t = 20`.
pub fn product_form(m: &ReducedModel) -> Result<(Check, f64)> {
    let start = Instant::now();
    let t = tols();
    let bundle = build_generator(m, &t)?;
    let map = DynamicalMap::new(m, &bundle, &t);
    let l = TimeDependentLindbladian::new(m, &bundle, &t)?;
    let rho0 = generic_state(m.dim());
    let grid = uniform_grid(0.0, 20.0, 200);
    let traj = integrate_mme_direct(&l, &rho0, &grid, 1e-9)?;
    let mut worst: f64 = 0.0;
    for (t, rho) in grid.iter().zip(&traj.states) {
        worst = worst.max(trace_norm(&(&map.evolve(&rho0, *t)? - rho)));
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        Check::new(
            worst <= 1e-6 && secs < 30.0,
            format!("sup ‖Λ_tρ₀ − ρ_t‖₁ = {worst:.2e}, {secs:.2}s"),
        ),
        worst,
    ))
}

/// Copy of `bundle` with the rates of the first block carrying a jump
/// operator negated.
pub fn sign_flipped(m: &ReducedModel, bundle: &GeneratorBundle) -> Result<GeneratorBundle> {
    let mut b = bundle.clone();
    let weight = |blk: &lpme_core::generator::KossakowskiBlock| {
        let strongest = (0..m.couplings().len())
            .filter_map(|mu| b.jumps.get(mu, &blk.n, blk.omega_index))
            .map(|op| op.frobenius_norm().powi(2))
            .fold(0.0, f64::max);
        blk.rates.max_abs() * strongest
    };
    let target = (0..b.blocks.len())
        .max_by(|&i, &j| weight(&b.blocks[i]).total_cmp(&weight(&b.blocks[j])))
        .expect("at least one block");
    b.blocks[target].rates = b.blocks[target].rates.scale_real(-1.0);
    b.dissipator = dissipator_from_blocks(m.dim(), &b.jumps, &b.blocks);
    b.x = assemble_x(&b.delta_h, &b.dissipator, m.h_bar())?;
    Ok(b)
}

pub fn cptp(m: &ReducedModel) -> Result<Check> {
    let t = tols();
    let bundle = build_generator(m, &t)?;
    let map = DynamicalMap::new(m, &bundle, &t);
    let times = log_grid(1e-3, 50.0, 20);
    let cert = cptp_certificate(&map, &times, 20, 7, CertificateThresholds::default())?;
    let flipped = DynamicalMap::new(m, &sign_flipped(m, &bundle)?, &t);
    let control = cptp_certificate(&flipped, &times, 20, 7, CertificateThresholds::default())?;
    Ok(Check::new(
        cert.passed() && !control.passed(),
        format!(
            "min Choi eig {:.2e}, trace defect {:.2e}, hermiticity {:.2e}; sign-flipped control min Choi eig {:.2e} ({})",
            cert.worst_choi(),
            cert.worst_trace_defect(),
            cert.worst_hermiticity_defect(),
            control.worst_choi(),
            if control.passed() { "not detected" } else { "rejected" }
        ),
    ))
}

pub fn structural(m: &ReducedModel) -> Result<Check> {
    let t = tols();
    let jd = prepare_jumps(m, &t)?;
    let h_bar = m.h_bar();
    let mut comm: f64 = 0.0;
    for j in jd.jumps.iter() {
        comm = comm.max((&h_bar.commutator(&j.op) - &j.op.scale_real(j.omega)).max_abs());
    }
    let mut completeness: f64 = 0.0;
    for (mu, s) in m.couplings().iter().enumerate() {
        let (series, _) = interaction_picture_coupling_series(m.p_series(), s, t.truncation_loss)?;
        for (n, s_hat) in series.iter() {
            let mut sum = CMatrix::zeros(m.dim(), m.dim());
            for w in 0..jd.decomposition.bohr_freqs().len() {
                if let Some(op) = jd.jumps.get(mu, n, w) {
                    sum += op;
                }
            }
            completeness = completeness.max((&sum - s_hat).max_abs());
        }
    }
    Ok(Check::new(
        comm <= 1e-10 && completeness <= 1e-12,
        format!("[H̄,S]−ωS {comm:.2e}, Σ_ω S − Ŝ {completeness:.2e}"),
    ))
}

/// `Σ_ω e^{−iωt} q_ω(ρ) = e^{−iH̄t} ρ e^{iH̄t}` on seeded random qutrits.
pub fn bohr_splitting_identity(seed: u64) -> Result<Check> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut herm = || {
        CMatrix::from_fn(3, 3, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .hermitian_part()
    };
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let h = herm();
        let rho = herm();
        let dec = lpme_core::bohr::decompose_averaged_hamiltonian(&h, 1e-9, 1e-9)?;
        for t in [0.3, 1.0, 4.7, 13.0] {
            let u = expm(&h.scale(-I * t))?;
            let exact = &(&u * &rho) * &u.adjoint();
            let mut sum = CMatrix::zeros(3, 3);
            for &w in dec.bohr_freqs() {
                sum.add_scaled(C64::from_polar(1.0, -w * t), &q_omega_apply(&dec, w, &rho)?);
            }
            worst = worst.max((&sum - &exact).max_abs());
        }
    }
    Ok(Check::new(worst <= 1e-11, format!("q_ω identity {worst:.2e}")))
}

pub fn covariance(m: &ReducedModel) -> Result<Check> {
    let t = tols();
    let bundle = build_generator(m, &t)?;
    let cov = check_covariance(&bundle.dissipative_part(), m.h_bar())?;
    let comm = bundle.delta_h.commutator(m.h_bar()).max_abs();
    Ok(Check::new(
        cov <= 1e-10 && comm <= 1e-10 && bundle.delta_h.max_abs() > 0.0,
        format!(
            "‖[K, ad_H̄]‖ {cov:.2e}, ‖[ΔH, H̄]‖ {comm:.2e}, ‖ΔH‖ {:.2e}",
            bundle.delta_h.max_abs()
        ),
    ))
}

pub fn selection_rule(m: &ReducedModel) -> Result<Check> {
    let t = tols();
    let jd = prepare_jumps(m, &t)?;
    let dev = cross_check_selection_rule(&jd, m.bath(), m.omega(), m.couplings().len(), 1e-9, &t)?;
    Ok(Check::new(dev <= 1e-10, format!("deviation {dev:.2e}")))
}

/// The congruent model must fail validation and show a large deviation.
pub fn selection_rule_violated(m: &ReducedModel) -> Result<Check> {
    let t = tols();
    let report = validate_model(m, &t);
    let jd = prepare_jumps(m, &t)?;
    let dev = cross_check_selection_rule(&jd, m.bath(), m.omega(), m.couplings().len(), 1e-9, &t)?;
    let refused = build_generator(m, &t).is_err();
    Ok(Check::new(
        dev > 1e-3 && !report.passed() && refused,
        format!(
            "congruent control deviation {dev:.2e}, validation {}, build {}",
            if report.passed() { "passed" } else { "failed" },
            if refused { "refused" } else { "accepted" }
        ),
    ))
}

pub fn spectral(m: &ReducedModel) -> Result<Check> {
    let t = tols();
    let bundle = build_generator(m, &t)?;
    let rep = spectrum_classification(&bundle.x, &t)?;
    Ok(Check::new(
        rep.max_real_part <= 1e-9 && rep.zero_distance <= 1e-10 && rep.conjugation_residual <= 1e-10,
        format!(
            "max Re ξ {:.2e}, dist(0) {:.2e}, conj mismatch {:.2e}",
            rep.max_real_part, rep.zero_distance, rep.conjugation_residual
        ),
    ))
}

pub fn limit_cycle_check(m: &ReducedModel) -> Result<Check> {
    let t = tols();
    let bundle = build_generator(m, &t)?;
    let map = DynamicalMap::new(m, &bundle, &t);
    let rep = spectrum_classification(&bundle.x, &t)?;
    let rho0 = generic_state(m.dim());
    let cycle = limit_cycle(&map, &rho0)?;
    let slowest = cycle
        .slowest_present_rate(1e-12)
        .expect("generic state excites a decaying mode");
    let horizon = 30.0 / slowest;
    let grid = uniform_grid(0.0, horizon, 400);
    let fit = decay_rate_fit(&map, &cycle, &rho0, &grid)?;
    let rel = (fit.rate - slowest).abs() / slowest;

    let amplitude = cycle.transient_amplitude();
    let bound_ok = fit
        .distances
        .iter()
        .all(|&(t, d)| d <= amplitude * (-slowest * t).exp() * (1.0 + 1e-6) + 1e-12);
    let flag_ok = cycle.quasiperiodic == rep.indices(SpectralClass::Oscillating).next().is_none();
    let last = fit.distances.last().map_or(0.0, |x| x.1);
    let first = fit.distances.first().map_or(0.0, |x| x.1);
    Ok(Check::new(
        rel <= 0.05 && bound_ok && flag_ok && last < first,
        format!(
            "fitted rate {:.5} vs slowest mode {slowest:.5} ({:.2}%), bound {}, quasiperiodic flag {} (M₁ {})",
            fit.rate,
            rel * 100.0,
            if bound_ok { "holds" } else { "violated" },
            cycle.quasiperiodic,
            if flag_ok { "consistent" } else { "inconsistent" }
        ),
    ))
}

pub fn gibbs(m: &ReducedModel, beta: f64) -> Result<Check> {
    let t = tols();
    let bundle = build_generator(m, &t)?;
    let g = expm(&m.h_bar().scale_real(-beta))?;
    let z = g.trace().re;
    let g = g.scale_real(1.0 / z);
    let res = bundle.x.apply(&g)?.max_abs();
    Ok(Check::new(res <= 1e-10, format!("‖X(e^(−βH̄)/Z)‖ = {res:.2e}")))
}

/// Builds the generator of a congruent model with the gate bypassed.
pub fn ungated_bundle(m: &ReducedModel) -> Result<GeneratorBundle> {
    let t = tols();
    build_generator_from_jumps(m, prepare_jumps(m, &t)?, &t)
}

pub fn idx(n: &[i32]) -> MultiIndex {
    MultiIndex::new(n.to_vec())
}

pub fn ohmic(model: ReducedModel) -> ReducedModel {
    model.with_bath(BathSpectrum::ohmic_kms(0.1, 3.0, 1.0))
}
