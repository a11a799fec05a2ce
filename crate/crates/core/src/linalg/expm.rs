//! Matrix exponential by scaling and squaring with a degree-13 Padé
//! approximant (Higham 2005 coefficients).

use super::eigen::Lu;
use super::matrix::CMatrix;
use crate::error::{Error, Result};

#[allow(unused_imports)]
use num_traits::Float;

const THETA_13: f64 = 5.371_920_351_148_152;

const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    let n = a.require_square("expm")?;
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let norm = a.norm_1();
    let squarings = if norm > THETA_13 {
        let s = (norm / THETA_13).log2().ceil();
        if s > 1000.0 {
            return Err(Error::Overflow);
        }
        s as i32
    } else {
        0
    };
    let a = a.scale_real(0.5f64.powi(squarings));
    let b = &PADE_13;
    let id = CMatrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let mut u_inner = a6.scale_real(b[13]);
    u_inner.add_scaled(b[11].into(), &a4);
    u_inner.add_scaled(b[9].into(), &a2);
    let mut u = &a6 * &u_inner;
    u.add_scaled(b[7].into(), &a6);
    u.add_scaled(b[5].into(), &a4);
    u.add_scaled(b[3].into(), &a2);
    u.add_scaled(b[1].into(), &id);
    let u = &a * &u;

    let mut v_inner = a6.scale_real(b[12]);
    v_inner.add_scaled(b[10].into(), &a4);
    v_inner.add_scaled(b[8].into(), &a2);
    let mut v = &a6 * &v_inner;
    v.add_scaled(b[6].into(), &a6);
    v.add_scaled(b[4].into(), &a4);
    v.add_scaled(b[2].into(), &a2);
    v.add_scaled(b[0].into(), &id);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = Lu::new(&q).map_err(|_| Error::Overflow)?.solve(&p);
    for _ in 0..squarings {
        r = &r * &r;
        if !r.is_finite() {
            return Err(Error::Overflow);
        }
    }
    if !r.is_finite() {
        return Err(Error::Overflow);
    }
    Ok(r)
}
