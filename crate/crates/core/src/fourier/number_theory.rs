use super::{FrequencyVector, MultiIndex};

#[allow(unused_imports)]
use num_traits::Float;

/// Outcome of the bounded rational-independence scan.
#[derive(Clone, Debug, PartialEq)]
pub enum IndependenceCheck {
    Pass,
    /// Smallest `k ≠ 0` (max-norm, then lexicographic; first nonzero entry
    /// positive) with `|k·Ω| < tol·‖Ω‖`.
    Witness(MultiIndex),
}

impl IndependenceCheck {
    pub fn passed(&self) -> bool {
        matches!(self, IndependenceCheck::Pass)
    }
}

/// Scans `0 < max|k_i| ≤ K` for an integer relation among the frequencies.
///
/// This only decides independence up to the box and tolerance; a pass does
/// not rule out relations with larger coefficients.
pub fn check_rational_independence(
    omega: &FrequencyVector,
    search_box: i32,
    tol: f64,
) -> IndependenceCheck {
    let r = omega.r();
    let threshold = tol * omega.euclidean_norm();
    let best = MultiIndex::box_iter(r, search_box)
        .filter(|k| !k.is_zero() && canonical_sign(k))
        .filter(|k| omega.dot(k).abs() < threshold)
        .min_by(|a, b| a.cmp_by_size(b));
    match best {
        Some(k) => IndependenceCheck::Witness(k),
        None => IndependenceCheck::Pass,
    }
}

fn canonical_sign(k: &MultiIndex) -> bool {
    k.as_slice().iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}
