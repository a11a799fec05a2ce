//! Quasienergies, Bohr quasi-frequencies and the jump operators
//! `S_{μnω} = Σ_{ε_k − ε_l = ω} P_k Ŝ_{μ,n} P_l`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fourier::{
    series_adjoint, series_product_in_box, FourierOperatorSeries, FrequencyVector, MultiIndex,
};
use crate::linalg::{eig_hermitian, CMatrix, C64};

/// Spectral data of `H̄ = Σ_k ε_k P_k` and its Bohr frequencies.
#[derive(Clone, Debug)]
pub struct BohrDecomposition {
    quasienergies: Vec<f64>,
    projections: Vec<CMatrix>,
    bohr_freqs: Vec<f64>,
    /// `(k, l)` pairs with `ε_k − ε_l` in the cluster of each frequency.
    pairs: Vec<Vec<(usize, usize)>>,
    match_tolerance: f64,
}

impl BohrDecomposition {
    /// Distinct quasienergies, ascending.
    pub fn quasienergies(&self) -> &[f64] {
        &self.quasienergies
    }

    pub fn projections(&self) -> &[CMatrix] {
        &self.projections
    }

    /// Distinct Bohr frequencies, ascending; always contains exactly `0.0`.
    pub fn bohr_freqs(&self) -> &[f64] {
        &self.bohr_freqs
    }

    pub fn pairs(&self, omega_index: usize) -> &[(usize, usize)] {
        &self.pairs[omega_index]
    }

    pub fn dim(&self) -> usize {
        self.projections.first().map_or(0, CMatrix::rows)
    }

    /// Position of `ω` in [`bohr_freqs`](Self::bohr_freqs).
    pub fn frequency_index(&self, omega: f64) -> Result<usize> {
        self.bohr_freqs
            .iter()
            .position(|w| (w - omega).abs() <= self.match_tolerance)
            .ok_or(Error::UnknownFrequency { omega })
    }

    /// `Σ_{(k,l)∼ω} P_k A P_l`
    pub fn sandwich(&self, omega_index: usize, a: &CMatrix) -> CMatrix {
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for &(k, l) in &self.pairs[omega_index] {
            out += &(&(&self.projections[k] * a) * &self.projections[l]);
        }
        out
    }

    /// Reassembles `Σ_k ε_k P_k`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for (e, p) in self.quasienergies.iter().zip(&self.projections) {
            out.add_scaled(C64::new(*e, 0.0), p);
        }
        out
    }
}

/// Groups sorted values whose consecutive gaps are at most `gap`.
fn single_linkage(sorted: &[f64], gap: f64) -> Vec<core::ops::Range<usize>> {
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > gap {
            if i > start {
                clusters.push(start..i);
            }
            start = i;
        }
    }
    clusters
}

/// Diagonalizes `H̄`, clusters eigenvalues closer than
/// `tol_cluster · ‖H̄‖`, and collects the Bohr frequency set.
pub fn decompose_averaged_hamiltonian(
    h_bar: &CMatrix,
    tol_herm: f64,
    tol_cluster: f64,
) -> Result<BohrDecomposition> {
    let d = h_bar.require_square("averaged Hamiltonian")?;
    let eig = eig_hermitian(h_bar, tol_herm)?;
    let scale = eig.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let gap = tol_cluster * scale;

    let mut quasienergies = Vec::new();
    let mut projections = Vec::new();
    for range in single_linkage(&eig.values, gap) {
        let len = range.len() as f64;
        quasienergies.push(eig.values[range.clone()].iter().sum::<f64>() / len);
        let mut p = CMatrix::zeros(d, d);
        for j in range {
            let v = eig.vectors.column(j);
            p += &CMatrix::outer(&v, &v);
        }
        projections.push(p);
    }

    let m = quasienergies.len();
    let mut diffs: Vec<(f64, usize, usize)> = Vec::with_capacity(m * m);
    for k in 0..m {
        for l in 0..m {
            let w = if k == l {
                0.0
            } else {
                quasienergies[k] - quasienergies[l]
            };
            diffs.push((w, k, l));
        }
    }
    diffs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let sorted: Vec<f64> = diffs.iter().map(|x| x.0).collect();
    let mut bohr_freqs = Vec::new();
    let mut pairs = Vec::new();
    for range in single_linkage(&sorted, gap) {
        let members = &diffs[range];
        let omega = if members.iter().any(|x| x.1 == x.2) {
            0.0
        } else {
            members.iter().map(|x| x.0).sum::<f64>() / members.len() as f64
        };
        bohr_freqs.push(omega);
        pairs.push(members.iter().map(|x| (x.1, x.2)).collect());
    }

    Ok(BohrDecomposition {
        quasienergies,
        projections,
        bohr_freqs,
        pairs,
        match_tolerance: gap.max(f64::EPSILON * scale) + f64::MIN_POSITIVE,
    })
}

/// Fourier series of `p_t† S p_t`, formed in the doubled box so that the
/// product of the truncated series is exact. Returns the series and the
/// dropped tail, which exceeds `threshold` only for a box smaller than the
/// product support.
pub fn interaction_picture_coupling_series(
    p: &FourierOperatorSeries,
    s_mu: &CMatrix,
    threshold: f64,
) -> Result<(FourierOperatorSeries, f64)> {
    if s_mu.shape() != (p.d(), p.d()) {
        return Err(Error::DimensionMismatch {
            context: "coupling operator",
            expected: p.d(),
            found: s_mu.rows(),
        });
    }
    let trunc = 2 * p.trunc();
    let s = FourierOperatorSeries::constant(p.r(), s_mu.clone(), p.trunc());
    let (left, tail_left) = series_product_in_box(&series_adjoint(p), &s, trunc)?;
    let (full, tail_right) = series_product_in_box(&left, p, trunc)?;
    let tail = tail_left.hypot(tail_right);
    if tail > threshold {
        return Err(Error::TruncationLoss { tail, threshold });
    }
    Ok((full, tail))
}

/// One jump operator `S_{μnω}`.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpOperator {
    pub mu: usize,
    pub n: MultiIndex,
    pub omega_index: usize,
    pub omega: f64,
    pub op: CMatrix,
}

/// All nonzero jump operators, ordered by `ω` (outer), `n`, then `μ`.
#[derive(Clone, Debug, Default)]
pub struct JumpSet {
    ops: Vec<JumpOperator>,
}

impl JumpSet {
    pub fn from_ops(mut ops: Vec<JumpOperator>) -> Self {
        ops.sort_by(|a, b| {
            a.omega_index
                .cmp(&b.omega_index)
                .then_with(|| a.n.cmp(&b.n))
                .then_with(|| a.mu.cmp(&b.mu))
        });
        JumpSet { ops }
    }

    pub fn iter(&self) -> core::slice::Iter<'_, JumpOperator> {
        self.ops.iter()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn get(&self, mu: usize, n: &MultiIndex, omega_index: usize) -> Option<&CMatrix> {
        self.ops
            .iter()
            .find(|j| j.mu == mu && &j.n == n && j.omega_index == omega_index)
            .map(|j| &j.op)
    }

    /// Operators grouped into blocks sharing `(ω, n)`, in sum order.
    pub fn blocks(&self) -> impl Iterator<Item = &[JumpOperator]> {
        self.ops
            .chunk_by(|a, b| a.omega_index == b.omega_index && a.n == b.n)
    }
}

/// Builds `S_{μnω}` for every coupling series, dropping operators with
/// Frobenius norm below `tol_drop`.
pub fn build_jump_operators(
    decomp: &BohrDecomposition,
    coupling_series: &[FourierOperatorSeries],
    tol_drop: f64,
) -> JumpSet {
    let mut ops = Vec::new();
    for (mu, series) in coupling_series.iter().enumerate() {
        for (n, s_hat) in series.iter() {
            for (omega_index, &omega) in decomp.bohr_freqs.iter().enumerate() {
                let op = decomp.sandwich(omega_index, s_hat);
                if op.frobenius_norm() >= tol_drop {
                    ops.push(JumpOperator {
                        mu,
                        n: n.clone(),
                        omega_index,
                        omega,
                        op,
                    });
                }
            }
        }
    }
    JumpSet::from_ops(ops)
}

/// `q_ω(ρ) = Σ_{(k,l)∼ω} P_k ρ P_l`
pub fn q_omega_apply(decomp: &BohrDecomposition, omega: f64, rho: &CMatrix) -> Result<CMatrix> {
    if rho.shape() != (decomp.dim(), decomp.dim()) {
        return Err(Error::DimensionMismatch {
            context: "q_omega argument",
            expected: decomp.dim(),
            found: rho.rows(),
        });
    }
    let idx = decomp.frequency_index(omega)?;
    Ok(decomp.sandwich(idx, rho))
}

/// Outcome of the bounded congruence scan.
#[derive(Clone, Debug, PartialEq)]
pub enum CongruenceCheck {
    Pass,
    Witness {
        omega: f64,
        omega_prime: f64,
        n: MultiIndex,
    },
}

impl CongruenceCheck {
    pub fn passed(&self) -> bool {
        matches!(self, CongruenceCheck::Pass)
    }

    pub fn into_result(self) -> Result<()> {
        match self {
            CongruenceCheck::Pass => Ok(()),
            CongruenceCheck::Witness {
                omega,
                omega_prime,
                n,
            } => Err(Error::CongruenceViolation {
                omega,
                omega_prime,
                index: n.into_vec(),
            }),
        }
    }
}

/// Scans pairs `ω > ω′` (descending) and `0 < max|n_i| ≤ K` for
/// `|ω − ω′ − n·Ω| < tol`. Pairs with `ω < ω′` are covered by `−n`.
pub fn check_congruence_freedom(
    bohr_freqs: &[f64],
    omega: &FrequencyVector,
    search_box: i32,
    tol: f64,
) -> CongruenceCheck {
    let mut freqs = bohr_freqs.to_vec();
    freqs.sort_by(|a, b| b.total_cmp(a));
    let box_indices: Vec<(MultiIndex, f64)> = MultiIndex::box_iter(omega.r(), search_box)
        .filter(|n| !n.is_zero())
        .map(|n| {
            let w = omega.dot(&n);
            (n, w)
        })
        .collect();
    for (i, &w) in freqs.iter().enumerate() {
        for &w_prime in &freqs[i + 1..] {
            let diff = w - w_prime;
            let hit = box_indices
                .iter()
                .filter(|(_, nw)| (diff - nw).abs() < tol)
                .min_by(|a, b| a.0.cmp_by_size(&b.0));
            if let Some((n, _)) = hit {
                return CongruenceCheck::Witness {
                    omega: w,
                    omega_prime: w_prime,
                    n: n.clone(),
                };
            }
        }
    }
    CongruenceCheck::Pass
}
