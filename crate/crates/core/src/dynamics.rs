//! The product-form map `Λ_t = Σ_t e^{tX}`, two-time propagators, the
//! time-dependent Lindbladian `L_t`, and a step-halving RK4 integrator used
//! as an independent oracle for both.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fourier::{FourierOperatorSeries, FrequencyVector};
use crate::generator::GeneratorBundle;
use crate::linalg::{
    ad_superop, condition_number, devectorize, eig_general, expm, inverse, trace_norm, vectorize,
    CMatrix, Superoperator, C64, I,
};
use crate::model::{synthesize_hamiltonian, ReducedModel};
use crate::tolerances::Tolerances;

/// `Σ_t(ρ) = p_t ρ p_t†`
pub fn sigma_superop(
    p: &FourierOperatorSeries,
    omega: &FrequencyVector,
    t: f64,
    tol_unitarity: f64,
) -> Result<Superoperator> {
    let pt = p.evaluate(omega, t)?;
    let residual = pt.unitarity_residual();
    if residual > tol_unitarity {
        return Err(Error::NotUnitary {
            residual,
            tolerance: tol_unitarity,
        });
    }
    Ok(Superoperator::sandwich(&pt, &pt.adjoint()))
}

/// Eigendecomposition `X = V diag(ξ) V⁻¹`.
#[derive(Clone, Debug)]
pub struct GeneratorEigen {
    pub values: Vec<C64>,
    pub vectors: CMatrix,
    pub inverse: CMatrix,
    pub condition_number: f64,
}

impl GeneratorEigen {
    pub fn new(x: &Superoperator) -> Result<Self> {
        let eig = eig_general(x.matrix())?;
        let condition_number = condition_number(&eig.vectors);
        let inverse = inverse(&eig.vectors)?;
        Ok(GeneratorEigen {
            values: eig.values,
            vectors: eig.vectors,
            inverse,
            condition_number,
        })
    }

    /// `V diag(e^{tξ}) V⁻¹`
    pub fn exp(&self, t: f64) -> CMatrix {
        let n = self.values.len();
        let scaled = CMatrix::from_fn(n, n, |i, j| self.vectors[(i, j)] * (self.values[j] * t).exp());
        &scaled * &self.inverse
    }
}

/// `Λ_t = Σ_t e^{tX}` for one model and its generator.
#[derive(Clone, Debug)]
pub struct DynamicalMap {
    model: ReducedModel,
    bundle: GeneratorBundle,
    eigen: Option<GeneratorEigen>,
    tols: Tolerances,
}

impl DynamicalMap {
    /// Caches an eigendecomposition of `X` when its eigenvector condition
    /// number is below `tols.condition_limit`; otherwise every request
    /// goes through the matrix exponential.
    pub fn new(model: &ReducedModel, bundle: &GeneratorBundle, tols: &Tolerances) -> Self {
        let eigen = GeneratorEigen::new(&bundle.x)
            .ok()
            .filter(|e| e.condition_number < tols.condition_limit);
        DynamicalMap {
            model: model.clone(),
            bundle: bundle.clone(),
            eigen,
            tols: *tols,
        }
    }

    /// Same map, always exponentiating `tX` directly.
    pub fn without_eigen_cache(mut self) -> Self {
        self.eigen = None;
        self
    }

    pub fn model(&self) -> &ReducedModel {
        &self.model
    }

    pub fn bundle(&self) -> &GeneratorBundle {
        &self.bundle
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tols
    }

    pub fn eigen(&self) -> Option<&GeneratorEigen> {
        self.eigen.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// `e^{tX}`
    pub fn semigroup(&self, t: f64) -> Result<Superoperator> {
        let m = match &self.eigen {
            Some(e) => e.exp(t),
            None => expm(&self.bundle.x.matrix().scale_real(t))?,
        };
        Superoperator::from_matrix(self.dim(), m)
    }

    pub fn sigma(&self, t: f64) -> Result<Superoperator> {
        sigma_superop(self.model.p_series(), self.model.omega(), t, self.tols.unitarity)
    }

    /// `Σ_t⁻¹(ρ) = p_t⁻¹ ρ p_t⁻†`
    pub fn sigma_inverse(&self, t: f64) -> Result<Superoperator> {
        let p_inv = inverse(&self.model.p_at(t))?;
        Ok(Superoperator::sandwich(&p_inv, &p_inv.adjoint()))
    }

    /// `Λ_t`, for `t ≥ 0`.
    pub fn at(&self, t: f64) -> Result<Superoperator> {
        if t < 0.0 {
            return Err(Error::OrderViolation { t, s: 0.0 });
        }
        Ok(self.sigma(t)?.compose(&self.semigroup(t)?))
    }

    /// `Λ_t(ρ₀)`
    pub fn evolve(&self, rho0: &CMatrix, t: f64) -> Result<CMatrix> {
        let inner = self.semigroup(t)?.apply(rho0)?;
        let pt = self.model.p_at(t);
        Ok(&(&pt * &inner) * &pt.adjoint())
    }

    /// `Λ_{t,s} = Σ_t e^{(t−s)X} Σ_s⁻¹`, for `0 ≤ s ≤ t`.
    pub fn propagator(&self, t: f64, s: f64) -> Result<Superoperator> {
        if s > t || s < 0.0 {
            return Err(Error::OrderViolation { t, s });
        }
        Ok(self
            .sigma(t)?
            .compose(&self.semigroup(t - s)?)
            .compose(&self.sigma_inverse(s)?))
    }
}

/// Free function form of [`DynamicalMap::at`].
pub fn dynamical_map(map: &DynamicalMap, t: f64) -> Result<Superoperator> {
    map.at(t)
}

/// Free function form of [`DynamicalMap::propagator`].
pub fn propagator(map: &DynamicalMap, t: f64, s: f64) -> Result<Superoperator> {
    map.propagator(t, s)
}

/// A right-hand side `ẏ = F(t, y)` split into a time-dependent part that
/// is computed once per distinct time and a cheap action on the state.
pub trait VectorField {
    type Frozen;
    fn freeze(&self, t: f64) -> Self::Frozen;
    fn apply(&self, frozen: &Self::Frozen, y: &CMatrix) -> CMatrix;
}

/// `L_t = −i[H_t + Σ_t(ΔH), ·] + Σ_t D̄ Σ_t⁻¹`.
#[derive(Clone, Debug)]
pub struct TimeDependentLindbladian {
    omega: FrequencyVector,
    p: FourierOperatorSeries,
    h: FourierOperatorSeries,
    delta_h: CMatrix,
    dissipator: Superoperator,
}

/// Coefficients of `L_t` at one time.
#[derive(Clone, Debug)]
pub struct FrozenLindbladian {
    /// `H_t + p_t ΔH p_t†`
    pub hamiltonian: CMatrix,
    pub p: CMatrix,
}

impl TimeDependentLindbladian {
    pub fn new(model: &ReducedModel, bundle: &GeneratorBundle, tols: &Tolerances) -> Result<Self> {
        let h = synthesize_hamiltonian(model.p_series(), model.omega(), model.h_bar(), tols)?;
        Ok(TimeDependentLindbladian {
            omega: model.omega().clone(),
            p: model.p_series().clone(),
            h: h.series.pruned(0.0),
            delta_h: bundle.delta_h.clone(),
            dissipator: bundle.dissipator.clone(),
        })
    }

    pub fn hamiltonian_series(&self) -> &FourierOperatorSeries {
        &self.h
    }

    /// The assembled superoperator `L_t`.
    pub fn at(&self, t: f64) -> Superoperator {
        let frozen = self.freeze(t);
        let p_dag = frozen.p.adjoint();
        let coherent = ad_superop(&frozen.hamiltonian)
            .expect("square by construction")
            .scale(-I);
        let rotated = Superoperator::sandwich(&frozen.p, &p_dag)
            .compose(&self.dissipator)
            .compose(&Superoperator::sandwich(&p_dag, &frozen.p));
        &coherent + &rotated
    }
}

impl VectorField for TimeDependentLindbladian {
    type Frozen = FrozenLindbladian;

    fn freeze(&self, t: f64) -> FrozenLindbladian {
        let p = self.p.evaluate(&self.omega, t).expect("r checked at construction");
        let h = self.h.evaluate(&self.omega, t).expect("r checked at construction");
        let hamiltonian = &h + &(&(&p * &self.delta_h) * &p.adjoint());
        FrozenLindbladian { hamiltonian, p }
    }

    fn apply(&self, f: &FrozenLindbladian, rho: &CMatrix) -> CMatrix {
        let p_dag = f.p.adjoint();
        let inner = &(&p_dag * rho) * &f.p;
        let v = vectorize(&inner).expect("square state");
        let d_inner = devectorize(&self.dissipator.matrix().mul_vec(&v)).expect("square image");
        let dissipative = &(&f.p * &d_inner) * &p_dag;
        let coherent = f.hamiltonian.commutator(rho).scale(-I);
        &coherent + &dissipative
    }
}

/// Free function form of [`TimeDependentLindbladian::at`].
pub fn assemble_l_t(
    model: &ReducedModel,
    bundle: &GeneratorBundle,
    t: f64,
    tols: &Tolerances,
) -> Result<Superoperator> {
    Ok(TimeDependentLindbladian::new(model, bundle, tols)?.at(t))
}

/// Schrödinger right-hand side `u̇ = −i H_t u`.
#[derive(Clone, Debug)]
pub struct Schrodinger {
    omega: FrequencyVector,
    h: FourierOperatorSeries,
}

impl Schrodinger {
    pub fn new(h: FourierOperatorSeries, omega: FrequencyVector) -> Result<Self> {
        omega.require_r(h.r(), "Schrodinger field")?;
        Ok(Schrodinger { omega, h })
    }
}

impl VectorField for Schrodinger {
    type Frozen = CMatrix;

    fn freeze(&self, t: f64) -> CMatrix {
        self.h.evaluate(&self.omega, t).expect("r checked at construction")
    }

    fn apply(&self, h: &CMatrix, u: &CMatrix) -> CMatrix {
        (h * u).scale(-I)
    }
}

/// States sampled on a time grid by the direct integrator.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CMatrix>,
    /// Largest step used by the accepted refinement.
    pub step: f64,
    /// Largest distance between the last two refinements over the grid.
    pub refinement_difference: f64,
}

const INITIAL_STEP: f64 = 0.05;
const MAX_HALVINGS: u32 = 14;

/// Classical RK4 from `y(0) = y0` to every grid time, halving the step
/// until two successive refinements agree within `tol` at every grid time
/// in the norm `dist`.
pub fn integrate_on_grid<F: VectorField>(
    field: &F,
    y0: &CMatrix,
    grid: &[f64],
    tol: f64,
    dist: impl Fn(&CMatrix, &CMatrix) -> f64,
) -> Result<Trajectory> {
    check_grid(grid)?;
    let mut step = INITIAL_STEP;
    let mut previous = rk4_pass(field, y0, grid, step);
    for _ in 0..MAX_HALVINGS {
        step *= 0.5;
        let current = rk4_pass(field, y0, grid, step);
        let diff = previous
            .iter()
            .zip(&current)
            .map(|(a, b)| dist(a, b))
            .fold(0.0, f64::max);
        if !diff.is_finite() {
            return Err(Error::NonFinite);
        }
        if diff < tol {
            return Ok(Trajectory {
                times: grid.to_vec(),
                states: current,
                step,
                refinement_difference: diff,
            });
        }
        previous = current;
    }
    Err(Error::NoConvergence {
        routine: "rk4 step halving",
        iterations: MAX_HALVINGS as usize,
    })
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidInput("grid times must be finite and non-negative".into()));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("grid must be non-decreasing".into()));
    }
    Ok(())
}

fn rk4_pass<F: VectorField>(field: &F, y0: &CMatrix, grid: &[f64], max_step: f64) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(grid.len());
    let mut t = 0.0;
    let mut y = y0.clone();
    let mut frozen_start = field.freeze(t);
    for &target in grid {
        let span = target - t;
        if span > 0.0 {
            let steps = (span / max_step).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            for k in 0..steps {
                let t0 = t + k as f64 * h;
                let mid = field.freeze(t0 + 0.5 * h);
                let end = field.freeze(if k + 1 == steps { target } else { t0 + h });
                let k1 = field.apply(&frozen_start, &y);
                let mut y2 = y.clone();
                y2.add_scaled(C64::new(0.5 * h, 0.0), &k1);
                let k2 = field.apply(&mid, &y2);
                let mut y3 = y.clone();
                y3.add_scaled(C64::new(0.5 * h, 0.0), &k2);
                let k3 = field.apply(&mid, &y3);
                let mut y4 = y.clone();
                y4.add_scaled(C64::new(h, 0.0), &k3);
                let k4 = field.apply(&end, &y4);
                y.add_scaled(C64::new(h / 6.0, 0.0), &k1);
                y.add_scaled(C64::new(h / 3.0, 0.0), &k2);
                y.add_scaled(C64::new(h / 3.0, 0.0), &k3);
                y.add_scaled(C64::new(h / 6.0, 0.0), &k4);
                frozen_start = end;
            }
            t = target;
        }
        out.push(y.clone());
    }
    out
}

/// Integrates `ρ̇ = L_t(ρ)` directly, with refinements compared in trace
/// norm. Does not use the product form.
pub fn integrate_mme_direct(
    lindbladian: &TimeDependentLindbladian,
    rho0: &CMatrix,
    grid: &[f64],
    tol: f64,
) -> Result<Trajectory> {
    integrate_on_grid(lindbladian, rho0, grid, tol, |a, b| trace_norm(&(a - b)))
}

/// Integrates `u̇ = −iH_t u` from `u(0) = I`, refinements compared in
/// Frobenius norm.
pub fn integrate_schrodinger(
    h: &FourierOperatorSeries,
    omega: &FrequencyVector,
    grid: &[f64],
    tol: f64,
) -> Result<Trajectory> {
    let field = Schrodinger::new(h.clone(), omega.clone())?;
    integrate_on_grid(&field, &CMatrix::identity(h.d()), grid, tol, |a, b| {
        (a - b).frobenius_norm()
    })
}

/// `count` equally spaced times on `[start, stop]`.
pub fn uniform_grid(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => alloc::vec![start],
        _ => (0..count)
            .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
            .collect(),
    }
}
