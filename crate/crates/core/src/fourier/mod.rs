//! Truncated operator-valued Fourier series on the torus `𝕋^r`.

mod number_theory;
mod series;

pub use number_theory::{check_rational_independence, IndependenceCheck};
pub use series::{
    sample_times, series_adjoint, series_derivative, series_from_torus_samples, series_product,
    series_product_in_box, FourierOperatorSeries, TorusFit, DEFAULT_TRUNCATION,
};

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};

/// Frequencies `Ω = (Ω₁, …, Ω_r)`, all strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyVector(Vec<f64>);

impl FrequencyVector {
    pub fn new(omegas: Vec<f64>) -> Result<Self> {
        if omegas.is_empty() {
            return Err(Error::InvalidInput("frequency vector is empty".into()));
        }
        if let Some(w) = omegas.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidInput(alloc::format!(
                "frequencies must be finite and positive, got {w}"
            )));
        }
        Ok(FrequencyVector(omegas))
    }

    pub fn r(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `n·Ω`
    pub fn dot(&self, n: &MultiIndex) -> f64 {
        debug_assert_eq!(n.r(), self.r());
        self.0.iter().zip(n.as_slice()).map(|(w, &k)| w * k as f64).sum()
    }

    pub fn euclidean_norm(&self) -> f64 {
        num_traits::Float::sqrt(self.0.iter().map(|w| w * w).sum::<f64>())
    }

    pub(crate) fn require_r(&self, r: usize, context: &'static str) -> Result<()> {
        if self.r() != r {
            return Err(Error::DimensionMismatch {
                context,
                expected: r,
                found: self.r(),
            });
        }
        Ok(())
    }
}

/// Integer vector `n ∈ ℤ^r`. Ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<i32>);

impl MultiIndex {
    pub fn new(n: Vec<i32>) -> Self {
        MultiIndex(n)
    }

    pub fn zero(r: usize) -> Self {
        MultiIndex(alloc::vec![0; r])
    }

    /// `k`-th unit vector scaled by `m`.
    pub fn axis(r: usize, k: usize, m: i32) -> Self {
        let mut n = alloc::vec![0; r];
        n[k] = m;
        MultiIndex(n)
    }

    pub fn r(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<i32> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    pub fn max_norm(&self) -> i32 {
        self.0.iter().map(|k| k.abs()).max().unwrap_or(0)
    }

    /// Ordering by max-norm first, lexicographic second.
    pub fn cmp_by_size(&self, other: &Self) -> Ordering {
        self.max_norm()
            .cmp(&other.max_norm())
            .then_with(|| self.cmp(other))
    }

    /// Every index of the box `|n_i| ≤ trunc`, lexicographically.
    pub fn box_iter(r: usize, trunc: i32) -> impl Iterator<Item = MultiIndex> {
        let side = (2 * trunc + 1) as usize;
        let total = side.pow(r as u32);
        (0..total).map(move |mut flat| {
            let mut n = alloc::vec![0; r];
            for k in (0..r).rev() {
                n[k] = (flat % side) as i32 - trunc;
                flat /= side;
            }
            MultiIndex(n)
        })
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;
    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &MultiIndex {
    type Output = MultiIndex;
    fn sub(self, rhs: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &MultiIndex {
    type Output = MultiIndex;
    fn neg(self) -> MultiIndex {
        MultiIndex(self.0.iter().map(|a| -a).collect())
    }
}

impl From<Vec<i32>> for MultiIndex {
    fn from(n: Vec<i32>) -> Self {
        MultiIndex(n)
    }
}
