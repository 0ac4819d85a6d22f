//! q-numbers.
//!
//! `[x]_q = (q^x − q^{−x}) / (q − q^{−1})`, written here as
//! `sinh(x·h) / sinh(h)` with `h = ln q`. The form is symmetric under
//! `q → 1/q` by construction and reduces to `x` at `q = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Below this distance from `q = 1` the denominator `sinh(h)/h` is taken
/// from its Taylor series in `h = ln q` instead of the direct quotient.
pub const SERIES_THRESHOLD: f64 = 1e-4;

/// `sinh(u)/u` switches to its series below this `|u|`.
const SINHC_SERIES_BELOW: f64 = 1e-3;

/// The real deformation parameter `q > 0`. `q = 1` is the undeformed algebra.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct DeformationParameter(f64);

impl DeformationParameter {
    pub const UNDEFORMED: Self = Self(1.0);

    pub fn new(q: f64) -> Result<Self> {
        if q.is_finite() && q > 0.0 {
            Ok(Self(q))
        } else {
            Err(domain(format!("deformation parameter must be a finite q > 0, got {q}")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// Exactly `q == 1`.
    #[inline]
    pub fn is_undeformed(self) -> bool {
        self.0 == 1.0
    }

    #[inline]
    fn uses_series(self) -> bool {
        (self.0 - 1.0).abs() <= SERIES_THRESHOLD
    }

    /// `[x]_q` for finite `x`.
    pub fn bracket(self, x: f64) -> f64 {
        if self.uses_series() {
            x * bracket_ratio_series(x, self.0)
        } else {
            let h = self.0.ln();
            (x * h).sinh() / h.sinh()
        }
    }

    /// `[x]_q / x`, with its limit `h / sinh(h)` at `x = 0`.
    pub fn bracket_ratio(self, x: f64) -> f64 {
        if self.uses_series() {
            bracket_ratio_series(x, self.0)
        } else {
            bracket_ratio_direct(x, self.0)
        }
    }
}

impl TryFrom<f64> for DeformationParameter {
    type Error = crate::Error;

    fn try_from(q: f64) -> Result<Self> {
        Self::new(q)
    }
}

impl From<DeformationParameter> for f64 {
    fn from(q: DeformationParameter) -> f64 {
        q.0
    }
}

impl Default for DeformationParameter {
    fn default() -> Self {
        Self::UNDEFORMED
    }
}

fn sinhc(u: f64) -> f64 {
    if u.abs() < SINHC_SERIES_BELOW {
        let u2 = u * u;
        1.0 + u2 / 6.0 * (1.0 + u2 / 20.0 * (1.0 + u2 / 42.0))
    } else {
        u.sinh() / u
    }
}

pub(crate) fn bracket_ratio_direct(x: f64, q: f64) -> f64 {
    let h = q.ln();
    if x == 0.0 {
        h / h.sinh()
    } else {
        (x * h).sinh() / (x * h.sinh())
    }
}

pub(crate) fn bracket_ratio_series(x: f64, q: f64) -> f64 {
    let h = q.ln();
    sinhc(x * h) / sinhc(h)
}

fn check_x(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("q-number argument must be finite, got {x}")))
    }
}

/// `[x]_q = (q^x − q^{−x}) / (q − q^{−1})`; exactly `x` at `q = 1`.
pub fn q_bracket(x: f64, q: DeformationParameter) -> Result<f64> {
    check_x(x)?;
    Ok(q.bracket(x))
}

/// `[x]_q / x`, continuous through `x = 0` where it equals `2 ln q / (q − q^{−1})`
/// (and `1` when `q = 1`). Ladder-operator builders use this so they never divide
/// by a vanishing integer.
pub fn q_bracket_ratio(x: f64, q: DeformationParameter) -> Result<f64> {
    check_x(x)?;
    Ok(q.bracket_ratio(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(v: f64) -> DeformationParameter {
        DeformationParameter::new(v).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn trivial_values() {
        assert_eq!(q_bracket(0.0, q(2.0)).unwrap(), 0.0);
        assert!((q_bracket(1.0, q(3.7)).unwrap() - 1.0).abs() < 1e-15);
        assert!((q_bracket(2.0, q(2.0)).unwrap() - 2.5).abs() < 1e-15);
        assert_eq!(q_bracket(5.0, q(1.0)).unwrap(), 5.0);
    }

    #[test]
    fn ratio_values() {
        assert_eq!(q_bracket_ratio(3.0, q(1.0)).unwrap(), 1.0);
        assert!((q_bracket_ratio(2.0, q(2.0)).unwrap() - 1.25).abs() < 1e-15);
        // [4]_{3/2} = q^3 + q + q^-1 + q^-3 = 1261/216 exactly.
        let expected = 1261.0 / 864.0;
        assert!(rel(q_bracket_ratio(4.0, q(1.5)).unwrap(), expected) < 1e-15);
    }

    #[test]
    fn ratio_limit_at_zero() {
        assert_eq!(q_bracket_ratio(0.0, q(1.0)).unwrap(), 1.0);
        let qv: f64 = 2.0;
        let expected = 2.0 * qv.ln() / (qv - 1.0 / qv);
        assert!(rel(q_bracket_ratio(0.0, q(qv)).unwrap(), expected) < 1e-15);
        // continuity into the limit
        let near = q_bracket_ratio(1e-9, q(qv)).unwrap();
        assert!(rel(near, expected) < 1e-12);
    }

    #[test]
    fn domain_errors() {
        assert!(DeformationParameter::new(0.0).is_err());
        assert!(DeformationParameter::new(-1.0).is_err());
        assert!(DeformationParameter::new(f64::NAN).is_err());
        assert!(DeformationParameter::new(f64::INFINITY).is_err());
        assert!(q_bracket(f64::NAN, q(2.0)).is_err());
        assert!(q_bracket_ratio(f64::INFINITY, q(2.0)).is_err());
        assert!(serde_json::from_str::<DeformationParameter>("-0.5").is_err());
    }

    #[test]
    fn branches_agree_at_crossover() {
        for &qv in &[1.0 + SERIES_THRESHOLD, 1.0 - SERIES_THRESHOLD] {
            for i in -400..=400 {
                let x = i as f64 * 0.05;
                let a = bracket_ratio_direct(x, qv);
                let b = bracket_ratio_series(x, qv);
                assert!(rel(a, b) < 1e-12, "x={x} q={qv}: {a} vs {b}");
            }
            // large arguments, as met by big truncations
            for &x in &[100.0, 1000.0, 4096.0] {
                assert!(rel(bracket_ratio_direct(x, qv), bracket_ratio_series(x, qv)) < 1e-12);
            }
        }
    }

    #[test]
    fn continuity_at_one() {
        let eps = 1e-6;
        for i in -200..=200 {
            let x = i as f64 * 0.1;
            let dev = (q(1.0 + eps).bracket(x) - x).abs();
            assert!(dev <= (2.0 * x * x + 2.0) * eps, "x={x}: {dev}");
        }
    }

    #[test]
    fn integer_bracket_is_laurent_sum() {
        // [n]_q = sum_{i<n} q^{n-1-2i}
        for &qv in &[0.3f64, 0.9, 1.00005, 1.7, 4.0] {
            for n in 1..15 {
                let sum: f64 = (0..n).map(|i| qv.powi(n - 1 - 2 * i)).sum();
                assert!(rel(q(qv).bracket(n as f64), sum) < 1e-13);
            }
        }
    }

    proptest! {
        #[test]
        fn inversion_symmetry(x in -20.0f64..20.0, qv in 0.1f64..10.0) {
            let a = q(qv).bracket(x);
            let b = q(1.0 / qv).bracket(x);
            prop_assert!(rel(a, b) < 1e-12);
        }

        #[test]
        fn oddness(x in -20.0f64..20.0, qv in 0.1f64..10.0) {
            let a = q(qv).bracket(x);
            let b = q(qv).bracket(-x);
            prop_assert!((a + b).abs() <= 1e-14 * a.abs());
        }

        #[test]
        fn product_identity(a in -10.0f64..10.0, b in -10.0f64..10.0, qv in 0.1f64..10.0) {
            let qq = q(qv);
            let lhs = qq.bracket(a) * qq.bracket(b) - qq.bracket(a - 1.0) * qq.bracket(b - 1.0);
            let rhs = qq.bracket(a + b - 1.0);
            let scale = (qq.bracket(a) * qq.bracket(b)).abs()
                .max((qq.bracket(a - 1.0) * qq.bracket(b - 1.0)).abs())
                .max(rhs.abs());
            prop_assert!((lhs - rhs).abs() <= 1e-10 * scale);
        }
    }
}
