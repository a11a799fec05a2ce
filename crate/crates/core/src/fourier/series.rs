use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use super::{FrequencyVector, MultiIndex};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, I};

/// Default per-axis truncation `N`.
pub const DEFAULT_TRUNCATION: i32 = 8;

/// `Σ_n A_n e^{i n·θ}` with `d × d` coefficients on the box `|n_i| ≤ N`.
/// Absent coefficients are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierOperatorSeries {
    r: usize,
    d: usize,
    trunc: i32,
    coeffs: BTreeMap<MultiIndex, CMatrix>,
}

impl FourierOperatorSeries {
    pub fn zero(r: usize, d: usize, trunc: i32) -> Self {
        FourierOperatorSeries {
            r,
            d,
            trunc,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(r: usize, m: CMatrix, trunc: i32) -> Self {
        let mut s = Self::zero(r, m.rows(), trunc);
        s.coeffs.insert(MultiIndex::zero(r), m);
        s
    }

    /// Builds a series from `(n, A_n)` pairs; repeated indices accumulate.
    pub fn from_coeffs(
        r: usize,
        d: usize,
        trunc: i32,
        coeffs: impl IntoIterator<Item = (MultiIndex, CMatrix)>,
    ) -> Result<Self> {
        let mut s = Self::zero(r, d, trunc);
        for (n, m) in coeffs {
            s.insert(n, m)?;
        }
        Ok(s)
    }

    /// Adds `m` to the coefficient at `n`.
    pub fn insert(&mut self, n: MultiIndex, m: CMatrix) -> Result<()> {
        if n.r() != self.r {
            return Err(Error::DimensionMismatch {
                context: "multi-index length",
                expected: self.r,
                found: n.r(),
            });
        }
        if m.shape() != (self.d, self.d) {
            return Err(Error::DimensionMismatch {
                context: "series coefficient",
                expected: self.d,
                found: m.rows(),
            });
        }
        if n.max_norm() > self.trunc {
            return Err(Error::InvalidInput(alloc::format!(
                "index {:?} outside truncation box {}",
                n.as_slice(),
                self.trunc
            )));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        match self.coeffs.get_mut(&n) {
            Some(existing) => *existing += &m,
            None => {
                self.coeffs.insert(n, m);
            }
        }
        Ok(())
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn trunc(&self) -> i32 {
        self.trunc
    }

    pub fn get(&self, n: &MultiIndex) -> Option<&CMatrix> {
        self.coeffs.get(n)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &CMatrix)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Drops coefficients with Frobenius norm at or below `threshold`.
    pub fn pruned(mut self, threshold: f64) -> Self {
        self.coeffs.retain(|_, m| m.frobenius_norm() > threshold);
        self
    }

    /// Value at the torus point `θ`.
    pub fn evaluate_torus(&self, theta: &[f64]) -> CMatrix {
        assert_eq!(theta.len(), self.r, "torus point dimension mismatch");
        let phases = PhaseTable::new(theta, self.trunc);
        let mut out = CMatrix::zeros(self.d, self.d);
        for (n, m) in &self.coeffs {
            out.add_scaled(phases.phase(n), m);
        }
        out
    }

    /// `A_t = Σ_n A_n e^{i(n·Ω)t}`
    pub fn evaluate(&self, omega: &FrequencyVector, t: f64) -> Result<CMatrix> {
        omega.require_r(self.r, "evaluate")?;
        let theta: Vec<f64> = omega.as_slice().iter().map(|w| w * t).collect();
        Ok(self.evaluate_torus(&theta))
    }

    /// Largest Frobenius norm among coefficients.
    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs
            .values()
            .map(CMatrix::frobenius_norm)
            .fold(0.0, f64::max)
    }

    fn require_compatible(&self, other: &Self, context: &'static str) -> Result<()> {
        if self.r != other.r {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.r,
                found: other.r,
            });
        }
        if self.d != other.d {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.d,
                found: other.d,
            });
        }
        Ok(())
    }

    /// Coefficientwise `self + s·other`, on the larger of the two boxes.
    pub fn add_scaled(&self, s: C64, other: &Self) -> Result<Self> {
        self.require_compatible(other, "series sum")?;
        let mut out = self.clone();
        out.trunc = self.trunc.max(other.trunc);
        for (n, m) in &other.coeffs {
            out.insert(n.clone(), m.scale(s))?;
        }
        Ok(out)
    }

    pub fn map_coeffs(&self, f: impl Fn(&MultiIndex, &CMatrix) -> CMatrix) -> Self {
        FourierOperatorSeries {
            r: self.r,
            d: self.d,
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|(n, m)| (n.clone(), f(n, m))).collect(),
        }
    }
}

/// `e^{i k θ_j}` for every axis `j` and `|k| ≤ N`.
struct PhaseTable {
    trunc: i32,
    table: Vec<Vec<C64>>,
}

impl PhaseTable {
    fn new(theta: &[f64], trunc: i32) -> Self {
        let table = theta
            .iter()
            .map(|&th| {
                (-trunc..=trunc)
                    .map(|k| C64::from_polar(1.0, k as f64 * th))
                    .collect()
            })
            .collect();
        PhaseTable { trunc, table }
    }

    fn phase(&self, n: &MultiIndex) -> C64 {
        n.as_slice()
            .iter()
            .zip(&self.table)
            .map(|(&k, row)| row[(k + self.trunc) as usize])
            .product()
    }
}

/// Cauchy product truncated to the union box; returns the series and the
/// Frobenius norm of the dropped coefficients.
pub fn series_product(
    a: &FourierOperatorSeries,
    b: &FourierOperatorSeries,
) -> Result<(FourierOperatorSeries, f64)> {
    series_product_in_box(a, b, a.trunc.max(b.trunc))
}

/// Cauchy product truncated to the box `|n_i| ≤ trunc`.
pub fn series_product_in_box(
    a: &FourierOperatorSeries,
    b: &FourierOperatorSeries,
    trunc: i32,
) -> Result<(FourierOperatorSeries, f64)> {
    a.require_compatible(b, "series product")?;
    let mut acc: BTreeMap<MultiIndex, CMatrix> = BTreeMap::new();
    for (m, am) in &a.coeffs {
        for (k, bk) in &b.coeffs {
            let n = m + k;
            let term = am * bk;
            match acc.get_mut(&n) {
                Some(c) => *c += &term,
                None => {
                    acc.insert(n, term);
                }
            }
        }
    }
    let mut dropped = 0.0;
    let mut out = FourierOperatorSeries::zero(a.r, a.d, trunc);
    for (n, c) in acc {
        if n.max_norm() > trunc {
            dropped += c.frobenius_norm().powi(2);
        } else {
            out.coeffs.insert(n, c);
        }
    }
    Ok((out, dropped.sqrt()))
}

/// `(A†)_n = (A_{−n})†`
pub fn series_adjoint(a: &FourierOperatorSeries) -> FourierOperatorSeries {
    FourierOperatorSeries {
        r: a.r,
        d: a.d,
        trunc: a.trunc,
        coeffs: a.coeffs.iter().map(|(n, m)| (-n, m.adjoint())).collect(),
    }
}

/// Time derivative: coefficients `i(n·Ω) A_n`.
pub fn series_derivative(
    a: &FourierOperatorSeries,
    omega: &FrequencyVector,
) -> Result<FourierOperatorSeries> {
    omega.require_r(a.r, "series derivative")?;
    Ok(FourierOperatorSeries {
        r: a.r,
        d: a.d,
        trunc: a.trunc,
        coeffs: a
            .coeffs
            .iter()
            .filter(|(n, _)| !n.is_zero())
            .map(|(n, m)| (n.clone(), m.scale(I * omega.dot(n))))
            .collect(),
    })
}

/// `count` equally spaced times on `[0, 2π · max_j 1/Ω_j]`.
pub fn sample_times(omega: &FrequencyVector, count: usize) -> Vec<f64> {
    let slowest = omega.as_slice().iter().copied().fold(f64::INFINITY, f64::min);
    let horizon = 2.0 * PI / slowest;
    match count {
        0 => Vec::new(),
        1 => alloc::vec![0.0],
        _ => (0..count)
            .map(|k| horizon * k as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Series recovered from samples of a smooth function on the torus.
#[derive(Clone, Debug)]
pub struct TorusFit {
    pub series: FourierOperatorSeries,
    /// Largest reconstruction error on the grid shifted by half a step,
    /// which bounds truncation plus aliasing.
    pub tail_estimate: f64,
}

/// Discrete Fourier transform of `f` on a uniform grid of `2(2N+1)` points
/// per axis, keeping the box `|n_i| ≤ N`.
pub fn series_from_torus_samples(
    r: usize,
    d: usize,
    trunc: i32,
    mut f: impl FnMut(&[f64]) -> Result<CMatrix>,
) -> Result<TorusFit> {
    let m = 2 * (2 * trunc as usize + 1);
    let step = 2.0 * PI / m as f64;
    let total = m.pow(r as u32);
    let grid_point = |mut flat: usize, offset: f64| -> Vec<f64> {
        let mut theta = alloc::vec![0.0; r];
        for k in (0..r).rev() {
            theta[k] = (flat % m) as f64 * step + offset;
            flat /= m;
        }
        theta
    };

    let indices: Vec<MultiIndex> = MultiIndex::box_iter(r, trunc).collect();
    let mut coeffs: Vec<CMatrix> = indices.iter().map(|_| CMatrix::zeros(d, d)).collect();
    let norm = 1.0 / total as f64;
    for flat in 0..total {
        let theta = grid_point(flat, 0.0);
        let value = f(&theta)?;
        if value.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                context: "torus sample",
                expected: d,
                found: value.rows(),
            });
        }
        let phases = PhaseTable::new(&theta, trunc);
        for (n, c) in indices.iter().zip(coeffs.iter_mut()) {
            c.add_scaled(phases.phase(n).conj() * norm, &value);
        }
    }
    let series = FourierOperatorSeries::from_coeffs(r, d, trunc, indices.into_iter().zip(coeffs))?
        .pruned(0.0);

    let mut tail: f64 = 0.0;
    for flat in 0..total {
        let theta = grid_point(flat, 0.5 * step);
        let exact = f(&theta)?;
        tail = tail.max((&series.evaluate_torus(&theta) - &exact).frobenius_norm());
    }
    Ok(TorusFit {
        series,
        tail_estimate: tail,
    })
}
