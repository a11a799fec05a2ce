use proptest::prelude::*;

use lpme_core::fourier::{
    series_adjoint, series_derivative, series_product_in_box, FourierOperatorSeries,
    FrequencyVector, MultiIndex,
};
use lpme_core::linalg::{
    ad_superop, choi_of, eig_hermitian, expm, min_eigenvalue_hermitian, trace_norm, CMatrix,
    Superoperator, C64, I,
};

fn matrix(d: usize) -> impl Strategy<Value = CMatrix> {
    proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), d * d).prop_map(move |v| {
        CMatrix::from_row_major(d, d, v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
            .unwrap()
    })
}

fn hermitian(d: usize) -> impl Strategy<Value = CMatrix> {
    matrix(d).prop_map(|m| m.hermitian_part())
}

fn sized_hermitian() -> impl Strategy<Value = CMatrix> {
    (2usize..=4).prop_flat_map(hermitian)
}

fn density(d: usize) -> impl Strategy<Value = CMatrix> {
    matrix(d).prop_map(|a| {
        let rho = &a * &a.adjoint();
        let tr = rho.trace().re;
        rho.scale_real(1.0 / tr)
    })
}

/// Random series with `r = 2`, `d = 2` and support in the box 2.
fn series() -> impl Strategy<Value = FourierOperatorSeries> {
    proptest::collection::vec(((-2i32..=2, -2i32..=2), matrix(2)), 1..6).prop_map(|terms| {
        FourierOperatorSeries::from_coeffs(
            2,
            2,
            2,
            terms.into_iter().map(|((a, b), m)| (MultiIndex::new(vec![a, b]), m)),
        )
        .unwrap()
    })
}

fn omega() -> FrequencyVector {
    FrequencyVector::new(vec![1.0, 2f64.sqrt()]).unwrap()
}

fn product(a: &FourierOperatorSeries, b: &FourierOperatorSeries) -> FourierOperatorSeries {
    let (p, tail) = series_product_in_box(a, b, a.trunc() + b.trunc()).unwrap();
    assert_eq!(tail, 0.0);
    p
}

fn close(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).max_abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hermitian_eigen_reconstructs(h in sized_hermitian()) {
        let e = eig_hermitian(&h, 1e-12).unwrap();
        prop_assert!(close(&e.reconstruct(), &h) < 1e-12);
        prop_assert!(e.vectors.unitarity_residual() < 1e-12);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn expm_group_law(h in sized_hermitian(), s in -3.0..3.0f64, t in -3.0..3.0f64) {
        let a = h.scale(-I);
        let lhs = &expm(&a.scale_real(s)).unwrap() * &expm(&a.scale_real(t)).unwrap();
        let rhs = expm(&a.scale_real(s + t)).unwrap();
        prop_assert!(close(&lhs, &rhs) < 1e-12);
        prop_assert!(rhs.unitarity_residual() < 1e-12);
    }

    #[test]
    fn ad_spectrum_is_eigenvalue_differences(h in sized_hermitian()) {
        let d = h.rows();
        let lambda = eig_hermitian(&h, 1e-12).unwrap().values;
        let mut expected: Vec<f64> = lambda
            .iter()
            .flat_map(|a| lambda.iter().map(move |b| a - b))
            .collect();
        expected.sort_by(f64::total_cmp);
        let ad = ad_superop(&h).unwrap();
        let mut got: Vec<C64> = ad.eigenvalues().unwrap();
        prop_assert_eq!(got.len(), d * d);
        prop_assert!(got.iter().all(|z| z.im.abs() < 1e-10));
        got.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (g, e) in got.iter().zip(&expected) {
            prop_assert!((g.re - e).abs() < 1e-10);
        }
    }

    #[test]
    fn choi_of_kraus_map_is_hermitian_psd(a in matrix(3), b in matrix(3)) {
        let mut map = Superoperator::sandwich(&a, &a.adjoint());
        map.add_scaled(C64::new(1.0, 0.0), &Superoperator::sandwich(&b, &b.adjoint()));
        let choi = choi_of(&map);
        prop_assert!(choi.hermitian_residual() < 1e-14);
        prop_assert!(choi.min_eigenvalue() > -1e-12);
    }

    #[test]
    fn trace_norm_properties(x in matrix(3), y in matrix(3), h in hermitian(3), rho in density(3)) {
        let u = expm(&h.scale(-I)).unwrap();
        let nx = trace_norm(&x);
        prop_assert!((trace_norm(&(&(&u * &x) * &u.adjoint())) - nx).abs() < 1e-11 * (1.0 + nx));
        prop_assert!(trace_norm(&(&x + &y)) <= nx + trace_norm(&y) + 1e-12);
        prop_assert!((trace_norm(&x.scale(C64::new(0.0, -2.5))) - 2.5 * nx).abs() < 1e-11 * (1.0 + nx));
        prop_assert!((trace_norm(&rho) - 1.0).abs() < 1e-12);
        prop_assert!(min_eigenvalue_hermitian(&rho).unwrap() > -1e-12);
    }

    #[test]
    fn series_product_is_associative(a in series(), b in series(), c in series()) {
        let left = product(&product(&a, &b), &c);
        let right = product(&a, &product(&b, &c));
        for (n, m) in left.iter() {
            let other = right.get(n).cloned().unwrap_or_else(|| CMatrix::zeros(2, 2));
            prop_assert!(close(m, &other) < 1e-12);
        }
        prop_assert_eq!(left.len(), right.len());
    }

    #[test]
    fn series_product_matches_pointwise(a in series(), b in series()) {
        let ab = product(&a, &b);
        let om = omega();
        for k in 0..32 {
            let t = 0.37 * k as f64 - 3.0;
            let lhs = ab.evaluate(&om, t).unwrap();
            let rhs = &a.evaluate(&om, t).unwrap() * &b.evaluate(&om, t).unwrap();
            prop_assert!(close(&lhs, &rhs) < 1e-11);
        }
    }

    #[test]
    fn leibniz_rule(a in series(), b in series()) {
        let om = omega();
        let lhs = series_derivative(&product(&a, &b), &om).unwrap();
        let (da, db) = (series_derivative(&a, &om).unwrap(), series_derivative(&b, &om).unwrap());
        let rhs = product(&da, &b).add_scaled(C64::new(1.0, 0.0), &product(&a, &db)).unwrap();
        for t in [0.0, 0.8, 2.9, -4.1] {
            prop_assert!(close(&lhs.evaluate(&om, t).unwrap(), &rhs.evaluate(&om, t).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn adjoint_reverses_products(a in series(), b in series()) {
        let lhs = series_adjoint(&product(&a, &b));
        let rhs = product(&series_adjoint(&b), &series_adjoint(&a));
        let om = omega();
        for t in [0.0, 1.3, -2.2] {
            prop_assert!(close(&lhs.evaluate(&om, t).unwrap(), &rhs.evaluate(&om, t).unwrap()) < 1e-11);
        }
    }

    #[test]
    fn hermitian_series_evaluates_hermitian(a in series(), t in -10.0..10.0f64) {
        let h = a.add_scaled(C64::new(1.0, 0.0), &series_adjoint(&a)).unwrap();
        for (n, m) in h.iter() {
            let mirror = h.get(&-n).unwrap();
            prop_assert!(close(&m.adjoint(), mirror) < 1e-15);
        }
        prop_assert!(h.evaluate(&omega(), t).unwrap().hermitian_residual() < 1e-13);
    }

    #[test]
    fn derivative_matches_finite_difference(a in series(), t in -5.0..5.0f64) {
        let om = omega();
        let step = 1e-5;
        let fd = (&a.evaluate(&om, t + step).unwrap() - &a.evaluate(&om, t - step).unwrap())
            .scale_real(0.5 / step);
        let exact = series_derivative(&a, &om).unwrap().evaluate(&om, t).unwrap();
        prop_assert!(close(&fd, &exact) < 1e-7 * (1.0 + exact.max_abs()));
    }
}
