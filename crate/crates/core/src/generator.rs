//! The averaged weak-coupling generator
//! `X = −i[H̄ + ΔH, ·] + D̄` in second (GKLS) form.

use alloc::vec::Vec;

use crate::bohr::{
    build_jump_operators, check_congruence_freedom, decompose_averaged_hamiltonian,
    interaction_picture_coupling_series, BohrDecomposition, JumpOperator, JumpSet,
};
use crate::error::{Error, Result};
use crate::fourier::{FrequencyVector, MultiIndex};
use crate::linalg::{ad_superop, CMatrix, CompensatedSum, Superoperator, C64, I};
use crate::model::{bath_h, bath_zeta, BathSpectrum, ReducedModel};
use crate::tolerances::Tolerances;

/// Rate and Lamb-shift matrices over the coupling index for one `(ω, n)`.
#[derive(Clone, Debug)]
pub struct KossakowskiBlock {
    pub omega_index: usize,
    pub omega: f64,
    pub n: MultiIndex,
    /// `ω + n·Ω`
    pub shifted_frequency: f64,
    /// `h_μν(ω + n·Ω)`
    pub rates: CMatrix,
    /// `ζ_μν(ω + n·Ω)`
    pub lamb: CMatrix,
}

/// Bohr decomposition together with the jump operators of a model.
#[derive(Clone, Debug)]
pub struct JumpData {
    pub decomposition: BohrDecomposition,
    pub jumps: JumpSet,
    /// Dropped Fourier tail of the interaction-picture coupling series.
    pub coupling_tail: f64,
}

/// Everything assembled from a validated model.
#[derive(Clone, Debug)]
pub struct GeneratorBundle {
    pub decomposition: BohrDecomposition,
    pub jumps: JumpSet,
    pub blocks: Vec<KossakowskiBlock>,
    pub delta_h: CMatrix,
    pub dissipator: Superoperator,
    pub x: Superoperator,
    pub coupling_tail: f64,
}

impl GeneratorBundle {
    /// `−i ad_ΔH + D̄`, the part of `X` beyond the free evolution.
    pub fn dissipative_part(&self) -> Superoperator {
        let ad = ad_superop(&self.delta_h).expect("square by construction");
        &ad.scale(-I) + &self.dissipator
    }
}

/// Decomposes `H̄` and builds `S_{μnω}` without checking congruence.
pub fn prepare_jumps(model: &ReducedModel, tols: &Tolerances) -> Result<JumpData> {
    let decomposition =
        decompose_averaged_hamiltonian(model.h_bar(), tols.hermiticity, tols.cluster)?;
    let mut series = Vec::with_capacity(model.couplings().len());
    let mut tail_sq = 0.0;
    for s in model.couplings() {
        let (c, tail) =
            interaction_picture_coupling_series(model.p_series(), s, tols.truncation_loss)?;
        tail_sq += tail * tail;
        series.push(c);
    }
    let jumps = build_jump_operators(&decomposition, &series, tols.jump_drop);
    Ok(JumpData {
        decomposition,
        jumps,
        coupling_tail: num_traits::Float::sqrt(tail_sq),
    })
}

/// Evaluates `h` and `ζ` at every shifted frequency that carries a jump
/// operator, in `(ω, n)` order.
pub fn kossakowski_blocks(
    jumps: &JumpSet,
    bath: &BathSpectrum,
    omega: &FrequencyVector,
    couplings: usize,
    tols: &Tolerances,
) -> Result<Vec<KossakowskiBlock>> {
    jumps
        .blocks()
        .map(|block| {
            let first = &block[0];
            let shifted = first.omega + omega.dot(&first.n);
            let rates = bath_h(bath, shifted, couplings, tols.psd).map_err(|e| match e {
                Error::NotPsd {
                    omega,
                    min_eigenvalue,
                    ..
                } => Error::NotPsd {
                    index: first.n.as_slice().to_vec(),
                    omega,
                    min_eigenvalue,
                },
                other => other,
            })?;
            let lamb = bath_zeta(bath, shifted, couplings, tols.hermiticity)?;
            Ok(KossakowskiBlock {
                omega_index: first.omega_index,
                omega: first.omega,
                n: first.n.clone(),
                shifted_frequency: shifted,
                rates,
                lamb,
            })
        })
        .collect()
}

fn paired<'a>(
    jumps: &'a JumpSet,
    blocks: &'a [KossakowskiBlock],
) -> impl Iterator<Item = (&'a [JumpOperator], &'a KossakowskiBlock)> {
    jumps.blocks().zip(blocks)
}

/// `ΔH = Σ_{ω,n} Σ_{μν} ζ_μν(ω + n·Ω) S†_{μnω} S_{νnω}`
pub fn lamb_shift_from_blocks(dim: usize, jumps: &JumpSet, blocks: &[KossakowskiBlock]) -> CMatrix {
    let mut acc = CompensatedSum::new(dim, dim);
    for (ops, block) in paired(jumps, blocks) {
        for a in ops {
            let a_dag = a.op.adjoint();
            for b in ops {
                let z = block.lamb[(a.mu, b.mu)];
                if z != C64::new(0.0, 0.0) {
                    acc.add_scaled(z, &(&a_dag * &b.op));
                }
            }
        }
    }
    acc.finish()
}

/// `D̄(ρ) = Σ h_μν(ω + n·Ω)(S_ν ρ S_μ† − ½{S_μ†S_ν, ρ})`, summing with the
/// rate matrices of `blocks` (which need not be PSD).
pub fn dissipator_from_blocks(
    dim: usize,
    jumps: &JumpSet,
    blocks: &[KossakowskiBlock],
) -> Superoperator {
    let n2 = dim * dim;
    let mut acc = CompensatedSum::new(n2, n2);
    for (ops, block) in paired(jumps, blocks) {
        for a in ops {
            let a_dag = a.op.adjoint();
            for b in ops {
                let h = block.rates[(a.mu, b.mu)];
                if h == C64::new(0.0, 0.0) {
                    continue;
                }
                acc.add_scaled(h, &lindblad_term(&a_dag, &b.op).into_matrix());
            }
        }
    }
    Superoperator::from_matrix(dim, acc.finish()).expect("square by construction")
}

/// `ρ ↦ L ρ K − ½{K L, ρ}` for `K = S_μ†`, `L = S_ν`.
fn lindblad_term(s_mu_dag: &CMatrix, s_nu: &CMatrix) -> Superoperator {
    let kl = s_mu_dag * s_nu;
    let jump = Superoperator::sandwich(s_nu, s_mu_dag);
    let anti = &Superoperator::left(&kl) + &Superoperator::right(&kl);
    &jump - &anti.scale(C64::new(0.5, 0.0))
}

pub fn build_lamb_shift(
    jump_data: &JumpData,
    bath: &BathSpectrum,
    omega: &FrequencyVector,
    couplings: usize,
    tols: &Tolerances,
) -> Result<CMatrix> {
    let blocks = kossakowski_blocks(&jump_data.jumps, bath, omega, couplings, tols)?;
    Ok(lamb_shift_from_blocks(
        jump_data.decomposition.dim(),
        &jump_data.jumps,
        &blocks,
    ))
}

pub fn build_dissipator(
    jump_data: &JumpData,
    bath: &BathSpectrum,
    omega: &FrequencyVector,
    couplings: usize,
    tols: &Tolerances,
) -> Result<Superoperator> {
    let blocks = kossakowski_blocks(&jump_data.jumps, bath, omega, couplings, tols)?;
    Ok(dissipator_from_blocks(
        jump_data.decomposition.dim(),
        &jump_data.jumps,
        &blocks,
    ))
}

/// `X = −i ad_{H̄ + ΔH} + D̄`
pub fn assemble_x(
    delta_h: &CMatrix,
    dissipator: &Superoperator,
    h_bar: &CMatrix,
) -> Result<Superoperator> {
    let d = h_bar.require_square("assemble_x")?;
    if delta_h.shape() != (d, d) || dissipator.dim() != d {
        return Err(Error::DimensionMismatch {
            context: "assemble_x",
            expected: d,
            found: if dissipator.dim() != d {
                dissipator.dim()
            } else {
                delta_h.rows()
            },
        });
    }
    let ad = ad_superop(&(h_bar + delta_h))?;
    Ok(&ad.scale(-I) + dissipator)
}

/// `‖K∘ad_H̄ − ad_H̄∘K‖₂`
pub fn check_covariance(k: &Superoperator, h_bar: &CMatrix) -> Result<f64> {
    let ad = ad_superop(h_bar)?;
    if ad.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            context: "check_covariance",
            expected: k.dim(),
            found: ad.dim(),
        });
    }
    Ok((&k.compose(&ad) - &ad.compose(k)).norm())
}

/// Builds the generator from the double sum over all pairs of jump
/// operators whose shifted frequencies agree within `tol_delta`, and
/// returns its distance (induced 2-norm) from `−i ad_ΔH + D̄` built from
/// the diagonal `(ω, n) = (ω′, m)` terms alone.
pub fn cross_check_selection_rule(
    jump_data: &JumpData,
    bath: &BathSpectrum,
    omega: &FrequencyVector,
    couplings: usize,
    tol_delta: f64,
    tols: &Tolerances,
) -> Result<f64> {
    let dim = jump_data.decomposition.dim();
    let blocks = kossakowski_blocks(&jump_data.jumps, bath, omega, couplings, tols)?;
    let delta_h = lamb_shift_from_blocks(dim, &jump_data.jumps, &blocks);
    let diagonal = &ad_superop(&delta_h)?.scale(-I)
        + &dissipator_from_blocks(dim, &jump_data.jumps, &blocks);

    let ops: Vec<(&JumpOperator, f64)> = jump_data
        .jumps
        .iter()
        .map(|j| (j, j.omega + omega.dot(&j.n)))
        .collect();
    let n2 = dim * dim;
    let mut acc = CompensatedSum::new(n2, n2);
    for (a, wa) in &ops {
        let rates = bath_h(bath, *wa, couplings, tols.psd)?;
        let lamb = bath_zeta(bath, *wa, couplings, tols.hermiticity)?;
        let a_dag = a.op.adjoint();
        for (b, wb) in &ops {
            if (wa - wb).abs() >= tol_delta {
                continue;
            }
            let h = rates[(a.mu, b.mu)];
            if h != C64::new(0.0, 0.0) {
                acc.add_scaled(h, &lindblad_term(&a_dag, &b.op).into_matrix());
            }
            let z = lamb[(a.mu, b.mu)];
            if z != C64::new(0.0, 0.0) {
                let ad = ad_superop(&(&a_dag * &b.op))?;
                acc.add_scaled(-I * z, &ad.into_matrix());
            }
        }
    }
    let double = Superoperator::from_matrix(dim, acc.finish())?;
    Ok((&double - &diagonal).norm())
}

/// Full build: refuses models whose Bohr frequencies are congruent modulo
/// `Ω`, since the diagonal form of the generator relies on it.
pub fn build_generator(model: &ReducedModel, tols: &Tolerances) -> Result<GeneratorBundle> {
    let jump_data = prepare_jumps(model, tols)?;
    check_congruence_freedom(
        jump_data.decomposition.bohr_freqs(),
        model.omega(),
        tols.search_box,
        tols.congruence,
    )
    .into_result()?;
    build_generator_from_jumps(model, jump_data, tols)
}

/// Assembly step of [`build_generator`] without the congruence gate.
pub fn build_generator_from_jumps(
    model: &ReducedModel,
    jump_data: JumpData,
    tols: &Tolerances,
) -> Result<GeneratorBundle> {
    let couplings = model.couplings().len();
    let dim = model.dim();
    let blocks = kossakowski_blocks(&jump_data.jumps, model.bath(), model.omega(), couplings, tols)?;
    let delta_h = lamb_shift_from_blocks(dim, &jump_data.jumps, &blocks).hermitian_part();
    let dissipator = dissipator_from_blocks(dim, &jump_data.jumps, &blocks);
    let x = assemble_x(&delta_h, &dissipator, model.h_bar())?;
    Ok(GeneratorBundle {
        decomposition: jump_data.decomposition,
        jumps: jump_data.jumps,
        blocks,
        delta_h,
        dissipator,
        x,
        coupling_tail: jump_data.coupling_tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::FourierOperatorSeries;
    use crate::linalg::{c64, eig_general, pauli, vectorize, ZERO};
    use crate::model::LambShiftSpectrum;
    use alloc::sync::Arc;
    use alloc::vec;

    fn fv(w: &[f64]) -> FrequencyVector {
        FrequencyVector::new(w.to_vec()).unwrap()
    }

    fn static_qubit(gap: f64, couplings: Vec<CMatrix>, bath: BathSpectrum) -> ReducedModel {
        ReducedModel::new(
            fv(&[2f64.sqrt(), core::f64::consts::PI]),
            FourierOperatorSeries::constant(2, CMatrix::identity(2), 8),
            pauli::z().scale_real(gap / 2.0),
            couplings,
            bath,
        )
        .unwrap()
    }

    fn rho_generic() -> CMatrix {
        CMatrix::from_rows(&[[c64(0.6, 0.0), c64(0.2, 0.1)], [c64(0.2, -0.1), c64(0.4, 0.0)]])
    }

    #[test]
    fn zero_zeta_gives_zero_lamb_shift() {
        let m = static_qubit(1.0, vec![pauli::x()], BathSpectrum::flat(0.3));
        let b = build_generator(&m, &Tolerances::default()).unwrap();
        assert_eq!(b.delta_h.max_abs(), 0.0);
    }

    #[test]
    fn constant_zeta_single_term() {
        let m = static_qubit(1.0, vec![pauli::z()], BathSpectrum::flat(0.3).with_zeta(LambShiftSpectrum::Constant(0.2)));
        let b = build_generator(&m, &Tolerances::default()).unwrap();
        // one jump operator S = σ_z at ω = 0: ΔH = 0.2 σ_z σ_z
        assert!((&b.delta_h - &CMatrix::identity(2).scale_real(0.2)).max_abs() < 1e-15);
    }

    #[test]
    fn odd_zeta_on_sigma_x() {
        // ζ(±1) = ∓0.1 ⇒ ΔH = ζ(1) σ₋σ₊ + ζ(−1) σ₊σ₋ = 0.1 σ_z
        let zeta = LambShiftSpectrum::Custom(Arc::new(|w: f64| CMatrix::from_rows(&[[c64(-0.1 * w, 0.0)]])));
        let m = static_qubit(1.0, vec![pauli::x()], BathSpectrum::flat(0.3).with_zeta(zeta));
        let b = build_generator(&m, &Tolerances::default()).unwrap();
        assert!((&b.delta_h - &pauli::z().scale_real(0.1)).max_abs() < 1e-15);
        assert!(b.delta_h.commutator(&pauli::z()).max_abs() < 1e-15);
    }

    #[test]
    fn pure_dephasing_closed_form() {
        let gamma = 0.25;
        let m = static_qubit(0.7, vec![pauli::z()], BathSpectrum::flat(gamma));
        let b = build_generator(&m, &Tolerances::default()).unwrap();
        let rho = rho_generic();
        let expected = (&(&(&pauli::z() * &rho) * &pauli::z()) - &rho).scale_real(gamma);
        assert!((&b.dissipator.apply(&rho).unwrap() - &expected).max_abs() < 1e-15);
        // coherence decays at 2γ
        let coh = b.dissipator.apply(&pauli::plus()).unwrap();
        assert!((&coh + &pauli::plus().scale_real(2.0 * gamma)).max_abs() < 1e-15);
    }

    #[test]
    fn amplitude_damping_stationary_ratio() {
        let (down, up) = (0.4, 0.1);
        // ω = +1 raises energy, so h(1) is the excitation rate
        let bath = BathSpectrum::custom(move |w| {
            CMatrix::from_rows(&[[c64(if w > 0.5 { up } else if w < -0.5 { down } else { 0.0 }, 0.0)]])
        });
        let m = static_qubit(1.0, vec![pauli::x()], bath);
        let b = build_generator(&m, &Tolerances::default()).unwrap();
        // excited state |0⟩ (σ_z = +1), ground |1⟩
        let pe = up / (up + down);
        let rho = CMatrix::real_diag(&[pe, 1.0 - pe]);
        assert!(b.x.apply(&rho).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn trace_annihilation_and_unital_fixed_point() {
        let m = static_qubit(0.7, vec![pauli::z(), pauli::x()], BathSpectrum::flat(0.2));
        let b = build_generator(&m, &Tolerances::default()).unwrap();
        let id_vec = vectorize(&CMatrix::identity(2)).unwrap();
        let x = b.x.matrix();
        for col in 0..4 {
            let s: C64 = (0..4).map(|r| id_vec[r].conj() * x[(r, col)]).sum();
            assert!(s.norm() < 1e-12);
        }
        assert!(b.x.apply(&CMatrix::identity(2)).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn free_generator_spectrum() {
        let hb = pauli::z().scale_real(0.35);
        let x = assemble_x(&CMatrix::zeros(2, 2), &Superoperator::zero(2), &hb).unwrap();
        let mut ev = eig_general(x.matrix()).unwrap().values;
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        let expected = [c64(0.0, -0.7), ZERO, ZERO, c64(0.0, 0.7)];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn dephasing_spectrum() {
        let gamma = 0.25;
        let m = static_qubit(0.7, vec![pauli::z()], BathSpectrum::flat(gamma));
        let b = build_generator(&m, &Tolerances::default()).unwrap();
        let mut ev = eig_general(b.x.matrix()).unwrap().values;
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        let expected = [c64(-2.0 * gamma, -0.7), ZERO, ZERO, c64(-2.0 * gamma, 0.7)];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).norm() < 1e-14, "{a} vs {b}");
        }
    }

    #[test]
    fn covariance_of_dephasing_is_exact() {
        let m = static_qubit(0.7, vec![pauli::z()], BathSpectrum::flat(0.25));
        let b = build_generator(&m, &Tolerances::default()).unwrap();
        assert_eq!(check_covariance(&b.dissipative_part(), m.h_bar()).unwrap(), 0.0);
    }

    #[test]
    fn covariance_detects_sector_mixing() {
        // a jump operator σ_x mixes ω = ±1 sectors
        let k = Superoperator::sandwich(&pauli::x(), &pauli::x());
        assert!(check_covariance(&k, &pauli::z().scale_real(0.5)).unwrap() > 1e-3);
    }

    #[test]
    fn single_block_selection_rule_is_exact() {
        let m = static_qubit(0.7, vec![pauli::z()], BathSpectrum::flat(0.25));
        let jd = prepare_jumps(&m, &Tolerances::default()).unwrap();
        let dev = cross_check_selection_rule(&jd, m.bath(), m.omega(), 1, 1e-9, &Tolerances::default()).unwrap();
        assert_eq!(dev, 0.0);
    }

    #[test]
    fn congruent_model_is_refused() {
        let m = ReducedModel::new(
            fv(&[1.0, 2f64.sqrt()]),
            FourierOperatorSeries::constant(2, CMatrix::identity(2), 8),
            pauli::z().scale_real(0.5),
            vec![pauli::x()],
            BathSpectrum::flat(0.1),
        )
        .unwrap();
        assert!(matches!(
            build_generator(&m, &Tolerances::default()),
            Err(Error::CongruenceViolation { .. })
        ));
    }

    #[test]
    fn negative_rate_is_reported_with_index() {
        let bath = BathSpectrum::custom(|_| CMatrix::from_rows(&[[c64(-0.1, 0.0)]]));
        let m = static_qubit(0.7, vec![pauli::z()], bath);
        match build_generator(&m, &Tolerances::default()) {
            Err(Error::NotPsd { index, .. }) => assert_eq!(index, vec![0, 0]),
            other => panic!("{other:?}"),
        }
    }
}
