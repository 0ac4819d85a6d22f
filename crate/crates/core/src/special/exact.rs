//! Exact evaluation of the terminating series `2F1(−n, b; c; z)`.
//!
//! Every finite `f64` is a dyadic rational, so after scaling `b`, `c` and `z`
//! to a common power of two the nested (Horner) form of the series is a ratio
//! of Gaussian integers. It is accumulated with big integers and rounded once
//! at the end. The alternating terms of the series grow like `3^n` while the
//! sum stays polynomially bounded, which rules out plain `f64` summation for
//! the degrees used here.

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{domain, Result};

/// `x = mantissa · 2^exponent`, exactly.
fn decompose(x: f64) -> (i64, i64) {
    if x == 0.0 {
        return (0, 0);
    }
    let bits = x.to_bits();
    let sign: i64 = if bits >> 63 == 0 { 1 } else { -1 };
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = (bits & 0x000f_ffff_ffff_ffff) as i64;
    let (mantissa, exponent) = if raw_exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1 << 52), raw_exp - 1075)
    };
    (sign * mantissa, exponent)
}

/// Integer `m` such that `x = m · 2^scale`, for `scale` at or below the exponent of `x`.
fn scaled(x: f64, scale: i64) -> BigInt {
    let (m, e) = decompose(x);
    debug_assert!(m == 0 || e >= scale);
    BigInt::from(m) << ((e - scale).max(0) as usize)
}

fn exponent_of(x: f64) -> i64 {
    let (m, e) = decompose(x);
    if m == 0 {
        0
    } else {
        e
    }
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    const STEP: i64 = 1000;
    let big = 2f64.powi(STEP as i32);
    let small = 2f64.powi(-STEP as i32);
    while e > STEP {
        x *= big;
        e -= STEP;
    }
    while e < -STEP {
        x *= small;
        e += STEP;
    }
    x * 2f64.powi(e as i32)
}

/// `num / den` rounded to `f64` (within one ulp).
pub(crate) fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    assert!(!den.is_zero(), "zero denominator");
    let negative = (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus);
    let a = num.abs();
    let b = den.abs();
    // 65+ quotient bits so the final rounding dominates the truncated division.
    let shift = b.bits() as i64 - a.bits() as i64 + 65;
    let quotient = if shift >= 0 {
        (a << shift as usize) / b
    } else {
        a / (b << (-shift) as usize)
    };
    let mag = ldexp(quotient.to_f64().unwrap_or(f64::INFINITY), -shift);
    if negative {
        -mag
    } else {
        mag
    }
}

/// Exact partial sum of the first `terms` terms of `2F1(−n, b; c; z)`.
///
/// Terms with index above `n` vanish through the `(−n)_m` factor and are
/// dropped without evaluating their denominators.
pub(crate) fn hyp2f1_exact(n: usize, b: Complex64, c: f64, z: f64, terms: usize) -> Result<Complex64> {
    if !(b.re.is_finite() && b.im.is_finite() && c.is_finite() && z.is_finite()) {
        return Err(domain("hypergeometric parameters must be finite"));
    }
    let last = terms.saturating_sub(1).min(n);
    if last == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }

    let scale = [b.re, b.im, c].iter().map(|&v| exponent_of(v)).min().unwrap_or(0).min(0);
    let one = BigInt::from(1) << ((-scale) as usize);
    let b_re = scaled(b.re, scale);
    let b_im = scaled(b.im, scale);
    let c_int = scaled(c, scale);
    let z_scale = exponent_of(z).min(0);
    let z_int = scaled(z, z_scale);
    let z_den_shift = (-z_scale) as usize;

    // V_m = 1 + r_m V_{m+1}, r_m = (m − n)(b + m) z / ((m + 1)(c + m)), V_last = 1.
    let mut num_re = BigInt::from(1);
    let mut num_im = BigInt::zero();
    let mut den = BigInt::from(1);
    for m in (0..last).rev() {
        let bm_re = &b_re + &one * m;
        let c_m = &c_int + &one * m;
        if c_m.is_zero() {
            return Err(domain(format!(
                "2F1 lower parameter c = {c} hits a pole at term {}",
                m + 1
            )));
        }
        let s = BigInt::from(m as i64 - n as i64) * &z_int;
        let p_re = (&bm_re * &num_re - &b_im * &num_im) * &s;
        let p_im = (&bm_re * &num_im + &b_im * &num_re) * &s;
        let d_fac = (c_m * (m + 1)) << z_den_shift;
        den *= d_fac;
        num_re = &den + p_re;
        num_im = p_im;
    }
    Ok(Complex64::new(
        ratio_to_f64(&num_re, &den),
        ratio_to_f64(&num_im, &den),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decompose_roundtrip() {
        for &x in &[1.0, -0.3, 1.3, 2.0f64.powi(-1070), 5e-324, 1e300, 0.1] {
            let (m, e) = decompose(x);
            assert_eq!(ldexp(m as f64, e), x);
        }
    }

    #[test]
    fn ratio_rounding() {
        let third = ratio_to_f64(&BigInt::from(1), &BigInt::from(3));
        assert_eq!(third, 1.0 / 3.0);
        let neg = ratio_to_f64(&BigInt::from(-22), &BigInt::from(7));
        assert_eq!(neg, -22.0 / 7.0);
        let huge = BigInt::from(1) << 3000usize;
        assert_eq!(ratio_to_f64(&huge, &(BigInt::from(1) << 2999usize)), 2.0);
    }
}
