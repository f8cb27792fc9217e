//! Matrix exponential by Padé(13) scaling and squaring (Higham 2005).

use num_complex::Complex64;

use super::{identity, one_norm, scale, solve, CMat};

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

fn lin(terms: &[(f64, &CMat)]) -> CMat {
    let (n, m) = (terms[0].1.nrows(), terms[0].1.ncols());
    CMat::from_fn(n, m, |i, j| {
        terms.iter().map(|(c, a)| a[(i, j)] * *c).sum::<Complex64>()
    })
}

/// `exp(a)` for a square complex matrix.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    if n == 0 {
        return a.clone();
    }
    let norm = one_norm(a);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let a = scale(a, Complex64::new(2f64.powi(-s), 0.0));
    let b = &PADE_13;
    let id = identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let inner_u = &a6 * lin(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)]);
    let u_poly = lin(&[
        (1.0, &inner_u),
        (b[7], &a6),
        (b[5], &a4),
        (b[3], &a2),
        (b[1], &id),
    ]);
    let u = &a * u_poly;
    let inner_v = &a6 * lin(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)]);
    let v = lin(&[
        (1.0, &inner_v),
        (b[6], &a6),
        (b[4], &a4),
        (b[2], &a2),
        (b[0], &id),
    ]);
    let denom = lin(&[(1.0, &v), (-1.0, &u)]);
    let numer = lin(&[(1.0, &v), (1.0, &u)]);
    let mut r = solve(&denom, &numer);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_diagonal, from_real_rows, max_abs_diff};

    #[test]
    fn diagonal_exponential() {
        let d = from_diagonal(&[
            Complex64::new(-1.0, 0.5),
            Complex64::new(3.0, 0.0),
            Complex64::new(0.0, -20.0),
        ]);
        let e = expm(&d);
        let want = from_diagonal(&[
            Complex64::new(-1.0, 0.5).exp(),
            Complex64::new(3.0, 0.0).exp(),
            Complex64::new(0.0, -20.0).exp(),
        ]);
        assert!(max_abs_diff(&e, &want) < 1e-12 * 3f64.exp());
    }

    #[test]
    fn nilpotent_exponential_is_polynomial() {
        let a = from_real_rows(&[&[0., 2., 0.], &[0., 0., 3.], &[0., 0., 0.]]);
        let e = expm(&a);
        // I + A + A^2/2
        let want = from_real_rows(&[&[1., 2., 3.], &[0., 1., 3.], &[0., 0., 1.]]);
        assert!(max_abs_diff(&e, &want) < 1e-14);
    }

    #[test]
    fn rotation_generator() {
        let t = 7.3;
        let a = from_real_rows(&[&[0., -t], &[t, 0.]]);
        let e = expm(&a);
        let want = from_real_rows(&[&[t.cos(), -t.sin()], &[t.sin(), t.cos()]]);
        assert!(max_abs_diff(&e, &want) < 1e-13);
    }
}
