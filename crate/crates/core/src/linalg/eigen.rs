//! Eigensolvers for small dense complex matrices.
//!
//! Hermitian problems use cyclic complex Jacobi rotations, which are
//! backward stable and deliver orthonormal eigenvectors to working precision
//! even for clustered spectra. General matrices go through Householder
//! reduction to Hessenberg form, single-shift complex QR to Schur form, and
//! back substitution for the eigenvectors.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;
#[allow(unused_imports)]
use num_traits::Float;

use super::matrix::{CMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

const MAX_JACOBI_SWEEPS: usize = 100;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending, eigenvectors as
/// the columns of a unitary matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Reassembles `V diag(λ) V†`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        let scaled = CMatrix::from_fn(n, n, |i, j| self.vectors[(i, j)] * self.values[j]);
        &scaled * &self.vectors.adjoint()
    }
}

/// Hermitian eigendecomposition.
///
/// Fails with [`Error::NotHermitian`] when `‖H − H†‖_F > tol_herm · ‖H‖_F`.
/// The input is symmetrized before iterating, so the returned vectors are
/// orthonormal to rounding.
pub fn eig_hermitian(h: &CMatrix, tol_herm: f64) -> Result<HermitianEigen> {
    let n = h.require_square("eig_hermitian")?;
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    let scale = h.frobenius_norm();
    let residual = h.hermitian_residual();
    if residual > tol_herm * scale {
        return Err(Error::NotHermitian {
            residual: if scale > 0.0 { residual / scale } else { residual },
        });
    }
    let mut a = h.hermitian_part();
    let mut v = CMatrix::identity(n);
    if n == 0 || scale == 0.0 {
        return Ok(HermitianEigen {
            values: vec![0.0; n],
            vectors: v,
        });
    }

    let threshold = f64::EPSILON * scale;
    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            routine: "eig_hermitian",
            iterations: MAX_JACOBI_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
fn jacobi_rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let g = a[(p, q)];
    let r = g.norm();
    if r == 0.0 {
        return;
    }
    let n = a.rows();
    let phase = g / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // U = diag(1, e^{-iφ}) · [[c, s], [-s, c]] on the (p, q) plane.
    let pc = phase.conj();
    for k in 0..n {
        let x = a[(k, p)];
        let y = a[(k, q)];
        a[(k, p)] = x * c - y * pc * s;
        a[(k, q)] = x * s + y * pc * c;
    }
    for k in 0..n {
        let x = a[(p, k)];
        let y = a[(q, k)];
        a[(p, k)] = x * c - y * phase * s;
        a[(q, k)] = x * s + y * phase * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let x = v[(k, p)];
        let y = v[(k, q)];
        v[(k, p)] = x * c - y * pc * s;
        v[(k, q)] = x * s + y * pc * c;
    }
}

/// Eigenpairs of a general complex matrix.
///
/// `vectors` holds unit-norm right eigenvectors as columns, in the order of
/// `values`. `schur` is the triangular factor of `A = Z T Z†`.
#[derive(Clone, Debug)]
pub struct GeneralEigen {
    pub values: Vec<C64>,
    pub vectors: CMatrix,
}

pub fn eig_general(a: &CMatrix) -> Result<GeneralEigen> {
    let n = a.require_square("eig_general")?;
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let (t, z) = schur(a)?;
    let values = t.diagonal();
    let y = triangular_eigenvectors(&t);
    let mut vectors = &z * &y;
    for j in 0..n {
        let norm = (0..n).map(|i| vectors[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for i in 0..n {
                vectors[(i, j)] /= norm;
            }
        }
    }
    Ok(GeneralEigen { values, vectors })
}

/// Eigenvalues only.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<C64>> {
    a.require_square("eigenvalues")?;
    Ok(schur(a)?.0.diagonal())
}

/// Complex Schur decomposition `A = Z T Z†` with `T` upper triangular.
pub fn schur(a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let n = a.require_square("schur")?;
    let (mut h, mut z) = hessenberg(a);
    if n <= 1 {
        return Ok((h, z));
    }
    let norm = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let max_iter = 100 * n;
    let mut hi = n - 1;
    let mut iter = 0;
    let mut since_deflation = 0;
    while hi > 0 {
        // locate the start of the trailing unreduced block
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let s = if s == 0.0 { norm } else { s };
            if h[(lo, lo - 1)].norm() <= eps * s {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        iter += 1;
        since_deflation += 1;
        if iter > max_iter {
            return Err(Error::NoConvergence {
                routine: "schur",
                iterations: max_iter,
            });
        }
        let shift = if since_deflation % 11 == 10 {
            // exceptional shift to break cycles
            h[(hi, hi)] + C64::new(h[(hi, hi - 1)].norm() * 0.75, 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        qr_step(&mut h, &mut z, lo, hi, shift);
    }
    // clear rounding debris below the diagonal
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok((h, z))
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let l1 = half_tr + disc;
    let l2 = half_tr - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Givens pair (c, s) with `[c, s; -s̄, c] · [a; b] = [r; 0]`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    if b.is_zero() {
        return (1.0, ZERO);
    }
    if a.is_zero() {
        return (0.0, b.conj() / b.norm());
    }
    let an = a.norm();
    let rho = an.hypot(b.norm());
    (an / rho, (a / an) * b.conj() / rho)
}

fn qr_step(h: &mut CMatrix, z: &mut CMatrix, lo: usize, hi: usize, shift: C64) {
    let n = h.rows();
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for i in lo..hi {
        let (c, s) = givens(h[(i, i)], h[(i + 1, i)]);
        for j in i..n {
            let x = h[(i, j)];
            let y = h[(i + 1, j)];
            h[(i, j)] = x * c + s * y;
            h[(i + 1, j)] = -s.conj() * x + y * c;
        }
        rots.push((c, s));
    }
    for (k, &(c, s)) in rots.iter().enumerate() {
        let i = lo + k;
        for r in 0..=(i + 1).min(hi) {
            let x = h[(r, i)];
            let y = h[(r, i + 1)];
            h[(r, i)] = x * c + y * s.conj();
            h[(r, i + 1)] = -x * s + y * c;
        }
        for r in 0..n {
            let x = z[(r, i)];
            let y = z[(r, i + 1)];
            z[(r, i)] = x * c + y * s.conj();
            z[(r, i + 1)] = -x * s + y * c;
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}

/// Householder reduction to upper Hessenberg form, `A = Q H Q†`.
fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if xnorm == 0.0 || tail == 0.0 {
            continue;
        }
        let phase = if x[0].is_zero() { ONE } else { x[0] / x[0].norm() };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for vi in v.iter_mut() {
            *vi /= vnorm;
        }
        // H ← P H with P = I − 2vv† acting on rows k+1..n
        for j in 0..n {
            let dot: C64 = v
                .iter()
                .enumerate()
                .map(|(i, vi)| vi.conj() * h[(k + 1 + i, j)])
                .sum();
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= *vi * dot * 2.0;
            }
        }
        // H ← H P, Q ← Q P on columns k+1..n
        for m in [&mut h, &mut q] {
            for r in 0..n {
                let dot: C64 = v
                    .iter()
                    .enumerate()
                    .map(|(i, vi)| m[(r, k + 1 + i)] * vi)
                    .sum();
                for (i, vi) in v.iter().enumerate() {
                    m[(r, k + 1 + i)] -= dot * vi.conj() * 2.0;
                }
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

/// Right eigenvectors of an upper-triangular matrix, as columns.
///
/// Within a cluster of numerically equal eigenvalues a vanishing numerator
/// gives a zero component, so semisimple clusters keep independent vectors;
/// a non-vanishing one is regularized and shows up as a large condition
/// number downstream.
fn triangular_eigenvectors(t: &CMatrix) -> CMatrix {
    let n = t.rows();
    let tnorm = t.frobenius_norm().max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * tnorm;
    let mut y = CMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        y[(k, k)] = ONE;
        let mut ymax: f64 = 1.0;
        for i in (0..k).rev() {
            let num: C64 = ((i + 1)..=k).map(|j| t[(i, j)] * y[(j, k)]).sum();
            let mut den = t[(i, i)] - lambda;
            if den.norm() < small {
                if num.norm() <= 1e3 * small * ymax {
                    y[(i, k)] = ZERO;
                    continue;
                }
                den = C64::new(small, 0.0);
            }
            let yi = -num / den;
            ymax = ymax.max(yi.norm());
            y[(i, k)] = yi;
        }
    }
    y
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(a: &CMatrix) -> Result<Self> {
        let n = a.require_square("lu")?;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= f64::EPSILON * scale * (n as f64) || pivot == 0.0 {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
            }
            let d = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                if f.is_zero() {
                    continue;
                }
                for j in (k + 1)..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Lu { lu, perm })
    }

    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.rows();
        assert_eq!(b.len(), n, "rhs length mismatch");
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: C64 = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: C64 = ((i + 1)..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        x
    }

    pub fn solve(&self, b: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            out.set_column(j, &self.solve_vec(&b.column(j)));
        }
        out
    }

    pub fn inverse(&self) -> CMatrix {
        self.solve(&CMatrix::identity(self.lu.rows()))
    }
}

pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    Ok(Lu::new(a)?.solve(b))
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    Ok(Lu::new(a)?.inverse())
}

/// Singular values, descending, via the eigenvalues of the Hermitian
/// dilation `[[0, A], [A†, 0]]` (accurate to `ε‖A‖` also for tiny values).
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let (m, n) = a.shape();
    let dil = CMatrix::from_fn(m + n, m + n, |i, j| match (i < m, j < m) {
        (true, false) => a[(i, j - m)],
        (false, true) => a[(j, i - m)].conj(),
        _ => ZERO,
    });
    let eig = eig_hermitian(&dil, f64::INFINITY).expect("dilation is Hermitian by construction");
    let mut s: Vec<f64> = eig.values.iter().rev().take(m.min(n)).map(|&x| x.max(0.0)).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Induced 2-norm.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    singular_values(a)[0]
}

/// Trace norm `tr √(A†A)`, the sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// 2-norm condition number; infinite for singular input.
pub fn condition_number(a: &CMatrix) -> f64 {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Smallest eigenvalue of a Hermitian matrix (symmetrized first).
pub fn min_eigenvalue_hermitian(a: &CMatrix) -> Result<f64> {
    let eig = eig_hermitian(&a.hermitian_part(), f64::INFINITY)?;
    Ok(eig.values.first().copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    extern crate std;

    use super::*;
    use crate::linalg::matrix::{c64, pauli, I};
    use rand::{Rng, SeedableRng};

    fn random_matrix(rng: &mut impl Rng, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
        random_matrix(rng, n).hermitian_part()
    }

    #[test]
    fn diagonal_input_is_already_solved() {
        let h = CMatrix::real_diag(&[0.5, -0.5]);
        let e = eig_hermitian(&h, 1e-9).unwrap();
        assert_eq!(e.values, vec![-0.5, 0.5]);
        assert!((e.vectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((e.vectors[(0, 1)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sigma_x_eigenvalues() {
        let e = eig_hermitian(&pauli::x(), 1e-9).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        // ‖H − H†‖_F = 0.1·‖H‖_F for H = I + x E_12 with x² = 0.02/1.99
        let mut h = CMatrix::real_diag(&[1.0, 1.0]);
        h[(0, 1)] = c64((0.02f64 / 1.99).sqrt(), 0.0);
        let rel = h.hermitian_residual() / h.frobenius_norm();
        assert!((rel - 0.1).abs() < 1e-12);
        assert!(matches!(eig_hermitian(&h, 1e-9), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn hermitian_reconstruction_random() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for n in 1..=8 {
            for _ in 0..5 {
                let h = random_hermitian(&mut rng, n);
                let e = eig_hermitian(&h, 1e-9).unwrap();
                let err = (&e.reconstruct() - &h).frobenius_norm();
                assert!(err <= 1e-12 * h.frobenius_norm().max(1.0), "n={n} err={err}");
                let vv = &e.vectors.adjoint() * &e.vectors;
                assert!((&vv - &CMatrix::identity(n)).frobenius_norm() < 1e-12);
                assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn degenerate_hermitian_keeps_orthonormal_vectors() {
        let h = CMatrix::real_diag(&[1.0, 1.0, 2.0]);
        let u = {
            let mut rng = rand::rngs::StdRng::seed_from_u64(3);
            let g = random_hermitian(&mut rng, 3);
            crate::linalg::expm(&g.scale(I)).unwrap()
        };
        let rotated = &(&u * &h) * &u.adjoint();
        let e = eig_hermitian(&rotated, 1e-9).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-13 && (e.values[2] - 2.0).abs() < 1e-13);
        let vv = &e.vectors.adjoint() * &e.vectors;
        assert!((&vv - &CMatrix::identity(3)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn general_eigenpairs_random() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for n in 1..=10 {
            let a = random_matrix(&mut rng, n);
            let e = eig_general(&a).unwrap();
            let lam = CMatrix::diag(&e.values);
            let res = (&(&a * &e.vectors) - &(&e.vectors * &lam)).frobenius_norm();
            assert!(res < 1e-12 * a.frobenius_norm().max(1.0), "n={n} res={res}");
            let tr: C64 = e.values.iter().sum();
            assert!((tr - a.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn general_eigen_rotation_generator() {
        let a = CMatrix::from_real_rows(&[[0.0, 1.0], [-1.0, 0.0]]);
        let mut vals = eigenvalues(&a).unwrap();
        vals.sort_by(|x, y| x.im.total_cmp(&y.im));
        assert!((vals[0] - c64(0.0, -1.0)).norm() < 1e-14);
        assert!((vals[1] - c64(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn jordan_block_has_huge_condition_number() {
        let a = CMatrix::from_real_rows(&[[1.0, 1.0], [0.0, 1.0]]);
        let e = eig_general(&a).unwrap();
        assert!(condition_number(&e.vectors) > 1e8);
    }

    #[test]
    fn lu_solves_and_detects_singular() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let a = random_matrix(&mut rng, 6);
        let inv = inverse(&a).unwrap();
        assert!((&(&a * &inv) - &CMatrix::identity(6)).frobenius_norm() < 1e-12);
        let s = CMatrix::from_real_rows(&[[1.0, 2.0], [2.0, 4.0]]);
        assert_eq!(inverse(&s).unwrap_err(), Error::Singular);
    }

    #[test]
    fn trace_norm_examples() {
        assert!((trace_norm(&CMatrix::real_diag(&[1.0, -1.0])) - 2.0).abs() < 1e-15);
        assert_eq!(trace_norm(&CMatrix::zeros(2, 2)), 0.0);
        assert!((trace_norm(&CMatrix::real_diag(&[0.3, 0.7])) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trace_norm_unitary_invariance_and_subadditivity() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, 4);
            let b = random_matrix(&mut rng, 4);
            let u = crate::linalg::expm(&random_hermitian(&mut rng, 4).scale(I)).unwrap();
            let ua = &(&u * &a) * &u.adjoint();
            assert!((trace_norm(&ua) - trace_norm(&a)).abs() < 1e-12);
            assert!(trace_norm(&(&a + &b)) <= trace_norm(&a) + trace_norm(&b) + 1e-12);
        }
    }
}
