//! Superoperators on `M_d` in the column-stacking convention
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`, with `vec(X)[j·d + i] = X[i, j]`.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use super::eigen::{eig_hermitian, eig_general, spectral_norm};
use super::matrix::{CMatrix, C64};
use crate::error::{Error, Result};

/// Column-stacks a square matrix.
pub fn vectorize(m: &CMatrix) -> Result<Vec<C64>> {
    let d = m.require_square("vectorize")?;
    Ok((0..d * d).map(|k| m[(k % d, k / d)]).collect())
}

/// Inverse of [`vectorize`]; the length must be a perfect square.
pub fn devectorize(v: &[C64]) -> Result<CMatrix> {
    let d = isqrt(v.len());
    if d * d != v.len() {
        return Err(Error::DimensionMismatch {
            context: "devectorize",
            expected: d * d,
            found: v.len(),
        });
    }
    Ok(CMatrix::from_fn(d, d, |i, j| v[j * d + i]))
}

fn isqrt(n: usize) -> usize {
    let mut r = 0usize;
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Linear map on `M_d`, stored as its `d² × d²` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: CMatrix,
}

impl Superoperator {
    pub fn from_matrix(dim: usize, matrix: CMatrix) -> Result<Self> {
        if matrix.shape() != (dim * dim, dim * dim) {
            return Err(Error::DimensionMismatch {
                context: "superoperator matrix",
                expected: dim * dim,
                found: matrix.rows(),
            });
        }
        Ok(Superoperator { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Superoperator {
            dim,
            matrix: CMatrix::identity(dim * dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Superoperator {
            dim,
            matrix: CMatrix::zeros(dim * dim, dim * dim),
        }
    }

    /// `X ↦ A X B`
    pub fn sandwich(a: &CMatrix, b: &CMatrix) -> Self {
        let d = a.rows();
        Superoperator {
            dim: d,
            matrix: b.transpose().kron(a),
        }
    }

    /// `X ↦ A X`
    pub fn left(a: &CMatrix) -> Self {
        Self::sandwich(a, &CMatrix::identity(a.rows()))
    }

    /// `X ↦ X B`
    pub fn right(b: &CMatrix) -> Self {
        Self::sandwich(&CMatrix::identity(b.rows()), b)
    }

    /// Builds the matrix of an arbitrary linear action column by column.
    pub fn from_action(dim: usize, mut f: impl FnMut(&CMatrix) -> CMatrix) -> Self {
        let n = dim * dim;
        let mut matrix = CMatrix::zeros(n, n);
        for k in 0..n {
            let e = CMatrix::unit(dim, k % dim, k / dim);
            let image = f(&e);
            for (r, z) in vec_iter(&image).enumerate() {
                matrix[(r, k)] = z;
            }
        }
        Superoperator { dim, matrix }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.shape() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch {
                context: "superoperator argument",
                expected: self.dim,
                found: x.rows(),
            });
        }
        let v: Vec<C64> = vec_iter(x).collect();
        devectorize(&self.matrix.mul_vec(&v))
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Superoperator) -> Superoperator {
        assert_eq!(self.dim, other.dim, "superoperator dimension mismatch");
        Superoperator {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn scale(&self, s: C64) -> Superoperator {
        Superoperator {
            dim: self.dim,
            matrix: self.matrix.scale(s),
        }
    }

    pub fn add_scaled(&mut self, s: C64, other: &Superoperator) {
        self.matrix.add_scaled(s, &other.matrix);
    }

    /// Induced 2-norm of the matrix representation (the Hilbert–Schmidt
    /// operator norm of the map).
    pub fn norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.frobenius_norm()
    }

    pub fn is_finite(&self) -> bool {
        self.matrix.is_finite()
    }

    /// Eigenvalues of the matrix representation.
    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        Ok(eig_general(&self.matrix)?.values)
    }

    /// The dual map with respect to the Hilbert–Schmidt inner product.
    pub fn dual(&self) -> Superoperator {
        // vec(X)ᴴ vec(S(Y)) pairing: the dual matrix is the adjoint.
        Superoperator {
            dim: self.dim,
            matrix: self.matrix.adjoint(),
        }
    }
}

fn vec_iter(m: &CMatrix) -> impl Iterator<Item = C64> + '_ {
    let d = m.rows();
    (0..d * d).map(move |k| m[(k % d, k / d)])
}

impl Add for &Superoperator {
    type Output = Superoperator;
    fn add(self, rhs: &Superoperator) -> Superoperator {
        Superoperator {
            dim: self.dim,
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &Superoperator {
    type Output = Superoperator;
    fn sub(self, rhs: &Superoperator) -> Superoperator {
        Superoperator {
            dim: self.dim,
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul for &Superoperator {
    type Output = Superoperator;
    fn mul(self, rhs: &Superoperator) -> Superoperator {
        self.compose(rhs)
    }
}

/// Superoperator of `ρ ↦ [H, ρ]`, i.e. `I ⊗ H − Hᵀ ⊗ I`.
pub fn ad_superop(h: &CMatrix) -> Result<Superoperator> {
    let d = h.require_square("ad_superop")?;
    let id = CMatrix::identity(d);
    Ok(Superoperator {
        dim: d,
        matrix: &id.kron(h) - &h.transpose().kron(&id),
    })
}

/// Choi matrix `Σ_ij E_ij ⊗ S(E_ij)`, indexed as
/// `C[i·d + a, j·d + b] = S(E_ij)[a, b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    dim: usize,
    matrix: CMatrix,
}

impl ChoiMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn hermitian_residual(&self) -> f64 {
        self.matrix.hermitian_residual()
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eig_hermitian(&self.matrix.hermitian_part(), f64::INFINITY)
            .map(|e| e.values)
            .unwrap_or_default()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Frobenius norm of `tr_out C − I`, zero exactly for trace-preserving
    /// maps (`Σ_a C[i·d + a, j·d + a] = δ_ij`).
    pub fn trace_preservation_defect(&self) -> f64 {
        let d = self.dim;
        let partial = CMatrix::from_fn(d, d, |i, j| {
            let s: C64 = (0..d).map(|a| self.matrix[(i * d + a, j * d + a)]).sum();
            if i == j {
                s - 1.0
            } else {
                s
            }
        });
        partial.frobenius_norm()
    }
}

pub fn choi_of(s: &Superoperator) -> ChoiMatrix {
    let d = s.dim;
    let mut matrix = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            // S(E_ij) is the column of the superoperator at vec index j·d + i
            let col = j * d + i;
            for a in 0..d {
                for b in 0..d {
                    matrix[(i * d + a, j * d + b)] = s.matrix[(b * d + a, col)];
                }
            }
        }
    }
    ChoiMatrix { dim: d, matrix }
}

#[cfg(test)]
mod tests {
    extern crate std;

    use super::*;
    use crate::linalg::matrix::{c64, pauli, ONE, ZERO};
    use alloc::vec;
    use rand::{Rng, SeedableRng};

    #[test]
    fn vectorize_convention() {
        assert_eq!(vectorize(&CMatrix::identity(2)).unwrap(), vec![ONE, ZERO, ZERO, ONE]);
        let e12 = CMatrix::unit(2, 0, 1);
        assert_eq!(vectorize(&e12).unwrap(), vec![ZERO, ZERO, ONE, ZERO]);
    }

    #[test]
    fn vectorize_round_trip() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        let m = CMatrix::from_fn(3, 3, |_, _| c64(rng.gen(), rng.gen()));
        assert_eq!(devectorize(&vectorize(&m).unwrap()).unwrap(), m);
        assert!(devectorize(&[ONE; 3]).is_err());
        assert!(vectorize(&CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn sandwich_matches_direct_product() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(2);
        let mut r = || CMatrix::from_fn(3, 3, |_, _| c64(rng.gen(), rng.gen()));
        let (a, b, x) = (r(), r(), r());
        let got = Superoperator::sandwich(&a, &b).apply(&x).unwrap();
        assert!((&got - &(&(&a * &x) * &b)).max_abs() < 1e-14);
    }

    #[test]
    fn ad_of_identity_is_zero() {
        let ad = ad_superop(&CMatrix::identity(3)).unwrap();
        assert_eq!(ad.matrix().max_abs(), 0.0);
    }

    #[test]
    fn ad_sigma_z_on_raising() {
        let ad = ad_superop(&pauli::z()).unwrap();
        let out = ad.apply(&pauli::plus()).unwrap();
        assert!((&out - &pauli::plus().scale_real(2.0)).max_abs() < 1e-15);
    }

    #[test]
    fn ad_spectrum_is_eigenvalue_differences() {
        let ad = ad_superop(&CMatrix::real_diag(&[0.5, -0.5])).unwrap();
        let mut ev: Vec<f64> = ad.eigenvalues().unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        let expected = [-1.0, 0.0, 0.0, 1.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn choi_of_identity() {
        let c = choi_of(&Superoperator::identity(2));
        let ev = c.eigenvalues();
        assert!(ev[..3].iter().all(|x| x.abs() < 1e-14));
        assert!((ev[3] - 2.0).abs() < 1e-14);
        assert!(c.trace_preservation_defect() < 1e-15);
    }

    #[test]
    fn choi_of_transpose_is_not_psd() {
        let t = Superoperator::from_action(2, |x| x.transpose());
        let ev = choi_of(&t).eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-14);
        assert!((ev[3] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn choi_of_full_depolarizer() {
        let dep = Superoperator::from_action(2, |x| CMatrix::identity(2).scale(x.trace() * 0.5));
        let c = choi_of(&dep);
        assert!((c.matrix() - &CMatrix::identity(4).scale_real(0.5)).max_abs() < 1e-15);
        assert!(c.min_eigenvalue() >= 0.0);
    }
}
