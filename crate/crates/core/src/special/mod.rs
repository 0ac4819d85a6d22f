//! Terminating hypergeometric series, rising-factorial ratios and Pollaczek
//! polynomials.
//!
//! The orthonormal Pollaczek polynomials used for intelligent-state
//! coefficients satisfy
//!
//! ```text
//! ½√((n+1)(n+2k))·d_{n+1} + ½√(n(n+2k−1))·d_{n−1} − z·d_n = 0,   d_0 = 1
//! ```
//!
//! and have the closed form `iⁿ·((2k)_n/n!)^p·2F1(−n, k+iz; 2k; 2)`. Two
//! exponents `p` are offered through [`ExponentMode`]; [`arbitrate_exponent_mode`]
//! checks both against the recurrence above.

mod exact;

use std::sync::OnceLock;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Relative residual a closed form must meet against the three-term recurrence.
pub const RECURRENCE_TOLERANCE: f64 = 1e-9;

/// `2F1(−n, b; c; z) = Σ_{m=0}^{n} (−n)_m (b)_m / (c)_m · z^m / m!`.
///
/// The sum is evaluated exactly and rounded once, so the result is the
/// correctly rounded value (to within an ulp) whatever the cancellation.
/// Fails if a denominator `(c)_m`, `m ≤ n`, vanishes.
pub fn hyp2f1_terminating(n: usize, b: Complex64, c: f64, z: f64) -> Result<Complex64> {
    exact::hyp2f1_exact(n, b, c, z, n + 1)
}

/// Partial sum of the first `terms` terms of the same series. Any `terms > n`
/// gives the full sum.
pub fn hyp2f1_terminating_terms(
    n: usize,
    b: Complex64,
    c: f64,
    z: f64,
    terms: usize,
) -> Result<Complex64> {
    exact::hyp2f1_exact(n, b, c, z, terms)
}

/// `ln((c)_n / n!) = ln Γ(n+c) − ln Γ(c) − ln n!` for `c > 0`.
pub fn log_gamma_ratio(n: u64, c: f64) -> Result<f64> {
    if !(c.is_finite() && c > 0.0) {
        return Err(domain(format!("log_gamma_ratio needs c > 0, got {c}")));
    }
    let shift = c - 1.0;
    Ok((0..n).map(|i| (shift / (i as f64 + 1.0)).ln_1p()).sum())
}

/// Exponent applied to the rising-factorial ratio in the Pollaczek closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentMode {
    /// `((2k)_n/n!)^{n/2}`, the exponent as it is usually printed for this form.
    Paper,
    /// `((2k)_n/n!)^{1/2}`, the orthonormal normalization.
    #[default]
    Half,
}

impl ExponentMode {
    pub const ALL: [ExponentMode; 2] = [ExponentMode::Paper, ExponentMode::Half];

    fn power(self, n: usize) -> f64 {
        match self {
            ExponentMode::Paper => n as f64 / 2.0,
            ExponentMode::Half => 0.5,
        }
    }
}

impl std::fmt::Display for ExponentMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExponentMode::Paper => "paper",
            ExponentMode::Half => "half",
        })
    }
}

/// Degree, spectral argument and representation index of one polynomial value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PollaczekArgs {
    pub n: usize,
    pub z: Complex64,
    /// Bargmann index `k` (or spin `j` for [`pollaczek_spin`]).
    pub idx: f64,
}

impl PollaczekArgs {
    pub fn new(n: usize, z: Complex64, idx: f64) -> Self {
        Self { n, z, idx }
    }
}

fn i_pow(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn check_z(z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("spectral argument must be finite, got {z}")))
    }
}

/// `P_n(z; k) = iⁿ·((2k)_n/n!)^p·2F1(−n, k+iz; 2k; 2)`.
pub fn pollaczek(args: PollaczekArgs, mode: ExponentMode) -> Result<Complex64> {
    let PollaczekArgs { n, z, idx: k } = args;
    if !(k.is_finite() && k > 0.0) {
        return Err(domain(format!("Bargmann index must be > 0, got {k}")));
    }
    check_z(z)?;
    // k + i·z
    let b = Complex64::new(k - z.im, z.re);
    let f = hyp2f1_terminating(n, b, 2.0 * k, 2.0)?;
    let amplitude = (mode.power(n) * log_gamma_ratio(n as u64, 2.0 * k)?).exp();
    Ok(i_pow(n) * amplitude * f)
}

/// Spin-branch counterpart of [`pollaczek`]:
/// `C(2j, n)^p·2F1(−n, −j+z; −2j; 2)` for `0 ≤ n ≤ 2j`.
///
/// This is the continuation `k → −j` of the discrete-series family
/// (a symmetric Krawtchouk polynomial); it solves
/// `½√((n+1)(2j−n))·d_{n+1} + ½√(n(2j−n+1))·d_{n−1} − z·d_n = 0`.
/// The series never reaches its pole at term `2j+1` because `n ≤ 2j`.
pub fn pollaczek_spin(args: PollaczekArgs, mode: ExponentMode) -> Result<Complex64> {
    let PollaczekArgs { n, z, idx: j } = args;
    let two_j = spin_dimension(j)? - 1;
    if n > two_j {
        return Err(domain(format!("degree {n} exceeds 2j = {two_j}")));
    }
    check_z(z)?;
    let b = Complex64::new(-j + z.re, z.im);
    let f = hyp2f1_terminating(n, b, -2.0 * j, 2.0)?;
    let ln_binomial = log_gamma_ratio(n as u64, (two_j - n) as f64 + 1.0)?;
    Ok((mode.power(n) * ln_binomial).exp() * f)
}

pub(crate) fn spin_dimension(j: f64) -> Result<usize> {
    let two_j = 2.0 * j;
    if !(two_j.is_finite() && two_j >= 0.0 && two_j.fract() == 0.0) {
        return Err(domain(format!("spin j must be a nonnegative half-integer, got {j}")));
    }
    Ok(two_j as usize + 1)
}

/// Worst relative residual of the discrete-series Pollaczek recurrence over
/// `n = 0..=n_max`, each row scaled by `max(|d_{n−1}|, |d_n|, |d_{n+1}|)`.
pub fn recurrence_consistency(z: Complex64, k: f64, n_max: usize, mode: ExponentMode) -> Result<f64> {
    let d = (0..=n_max + 1)
        .map(|n| pollaczek(PollaczekArgs::new(n, z, k), mode))
        .collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    for n in 0..=n_max {
        let nf = n as f64;
        let up = 0.5 * ((nf + 1.0) * (nf + 2.0 * k)).sqrt() * d[n + 1];
        let down = if n == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            0.5 * (nf * (nf + 2.0 * k - 1.0)).sqrt() * d[n - 1]
        };
        let residual = (up + down - z * d[n]).norm();
        let scale = d[n + 1].norm().max(d[n].norm()).max(if n == 0 { 0.0 } else { d[n - 1].norm() });
        let r = residual / scale;
        // NaN (overflowing amplitudes) counts as a failure
        worst = if r.is_nan() { f64::INFINITY } else { worst.max(r) };
    }
    Ok(worst)
}

/// Outcome of checking both exponent modes against the recurrence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentArbitration {
    pub samples: usize,
    pub n_max: usize,
    pub tolerance: f64,
    pub worst_paper: f64,
    pub worst_half: f64,
    /// The mode that passes, if exactly one does.
    pub winner: Option<ExponentMode>,
}

impl ExponentArbitration {
    pub fn passes(&self, mode: ExponentMode) -> bool {
        let worst = match mode {
            ExponentMode::Paper => self.worst_paper,
            ExponentMode::Half => self.worst_half,
        };
        worst < self.tolerance
    }
}

/// Runs the recurrence-consistency check for both modes over `samples`
/// random `(z, k)` with `Re z ∈ [−3, 3]`, `Im z ∈ [−1, 1]`, `k ∈ [0.25, 4]`.
pub fn arbitrate_exponent_mode(samples: usize, n_max: usize, seed: u64) -> Result<ExponentArbitration> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_paper = 0.0f64;
    let mut worst_half = 0.0f64;
    for _ in 0..samples {
        let z = Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-1.0..1.0));
        let k = rng.random_range(0.25..4.0);
        worst_paper = worst_paper.max(recurrence_consistency(z, k, n_max, ExponentMode::Paper)?);
        worst_half = worst_half.max(recurrence_consistency(z, k, n_max, ExponentMode::Half)?);
    }
    let mut report = ExponentArbitration {
        samples,
        n_max,
        tolerance: RECURRENCE_TOLERANCE,
        worst_paper,
        worst_half,
        winner: None,
    };
    let passing: Vec<_> = ExponentMode::ALL.into_iter().filter(|&m| report.passes(m)).collect();
    if let [only] = passing[..] {
        report.winner = Some(only);
    }
    Ok(report)
}

pub const ARBITRATION_SAMPLES: usize = 100;
pub const ARBITRATION_DEGREE: usize = 50;
pub const ARBITRATION_SEED: u64 = 0x0005_eed0_f2f1;

/// The exponent mode selected by [`arbitrate_exponent_mode`] with the default
/// sample set. Computed once per process.
pub fn selected_exponent_mode() -> Result<ExponentMode> {
    static SELECTED: OnceLock<std::result::Result<ExponentMode, String>> = OnceLock::new();
    SELECTED
        .get_or_init(|| {
            let report = arbitrate_exponent_mode(ARBITRATION_SAMPLES, ARBITRATION_DEGREE, ARBITRATION_SEED)
                .map_err(|e| e.to_string())?;
            report.winner.ok_or_else(|| {
                format!(
                    "no unique exponent mode (worst paper {:e}, worst half {:e})",
                    report.worst_paper, report.worst_half
                )
            })
        })
        .clone()
        .map_err(Error::Internal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive, Zero};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    /// Exact complex rational `2F1(−n, b; c; z)` by direct term summation.
    fn oracle_2f1(n: usize, b: Complex64, c: f64, z: f64) -> (BigRational, BigRational) {
        let r = |x: f64| BigRational::from_float(x).unwrap();
        let (br, bi, cr, zr) = (r(b.re), r(b.im), r(c), r(z));
        let mut term = (BigRational::one(), BigRational::zero());
        let mut sum = term.clone();
        for m in 0..n {
            let mm = BigRational::from_integer(BigInt::from(m));
            let nn = BigRational::from_integer(BigInt::from(n));
            // term *= (m − n)(b + m) z / ((m + 1)(c + m))
            let bre = &br + &mm;
            let (tr, ti) = (&term.0 * &bre - &term.1 * &bi, &term.0 * &bi + &term.1 * &bre);
            let f = (&mm - &nn) * &zr / ((&mm + BigRational::one()) * (&cr + &mm));
            term = (tr * &f, ti * &f);
            sum = (&sum.0 + &term.0, &sum.1 + &term.1);
        }
        sum
    }

    fn to_c(v: &(BigRational, BigRational)) -> Complex64 {
        c(v.0.to_f64().unwrap(), v.1.to_f64().unwrap())
    }

    #[test]
    fn hyp2f1_trivial_cases() {
        assert_eq!(hyp2f1_terminating(0, c(7.0, -3.0), 3.0, 2.0).unwrap(), c(1.0, 0.0));
        let v = hyp2f1_terminating(1, c(1.0, 2.0), 2.0, 2.0).unwrap();
        assert!((v - c(0.0, -2.0)).norm() < 1e-15);
    }

    #[test]
    fn hyp2f1_against_rational_oracle() {
        let v = hyp2f1_terminating(3, c(0.5, 0.3), 1.0, 2.0).unwrap();
        let expected = to_c(&oracle_2f1(3, c(0.5, 0.3), 1.0, 2.0));
        assert!(close(v, expected, 1e-15), "{v} vs {expected}");

        // deep cancellation: terms reach ~3^60 while the sum is O(10^8)
        for &(n, b, cc) in &[(60, c(1.3, 0.7), 2.6), (45, c(0.25, -1.1), 0.5), (30, c(2.0, 0.0), 4.0)] {
            let v = hyp2f1_terminating(n, b, cc, 2.0).unwrap();
            let expected = to_c(&oracle_2f1(n, b, cc, 2.0));
            assert!(close(v, expected, 1e-14), "n={n}: {v} vs {expected}");
        }
    }

    #[test]
    fn hyp2f1_general_argument() {
        for &z in &[0.5, -1.25, 3.0] {
            let v = hyp2f1_terminating(7, c(0.3, 0.2), 1.7, z).unwrap();
            let expected = to_c(&oracle_2f1(7, c(0.3, 0.2), 1.7, z));
            assert!(close(v, expected, 1e-14));
        }
    }

    #[test]
    fn hyp2f1_pole() {
        // (c)_m vanishes at m = 3 for c = −2 with n = 5
        assert!(hyp2f1_terminating(5, c(1.0, 0.0), -2.0, 2.0).is_err());
        // but n = 2 stops before it
        assert!(hyp2f1_terminating(2, c(1.0, 0.0), -2.0, 2.0).is_ok());
    }

    #[test]
    fn termination_extra_terms_change_nothing() {
        for n in [0usize, 1, 5, 20] {
            let b = c(0.7, -0.4);
            let full = hyp2f1_terminating(n, b, 1.5, 2.0).unwrap();
            for extra in 1..4 {
                assert_eq!(hyp2f1_terminating_terms(n, b, 1.5, 2.0, n + 1 + extra).unwrap(), full);
            }
        }
    }

    #[test]
    fn log_gamma_ratio_values() {
        assert_eq!(log_gamma_ratio(0, 2.0).unwrap(), 0.0);
        assert!((log_gamma_ratio(1, 2.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(log_gamma_ratio(10, 1.0).unwrap().abs() < 1e-15);
        assert!(log_gamma_ratio(3, 0.0).is_err());
        assert!(log_gamma_ratio(3, -1.0).is_err());
    }

    #[test]
    fn log_gamma_ratio_against_lgamma() {
        use statrs::function::gamma::ln_gamma;
        for &cc in &[0.3, 1.0, 2.5, 17.0] {
            for &n in &[1u64, 7, 100, 5000, 100_000] {
                let expected = ln_gamma(n as f64 + cc) - ln_gamma(cc) - ln_gamma(n as f64 + 1.0);
                let got = log_gamma_ratio(n, cc).unwrap();
                assert!(got.is_finite());
                assert!((got - expected).abs() <= 1e-9 * expected.abs().max(1.0), "c={cc} n={n}");
            }
        }
    }

    #[test]
    fn pollaczek_small_cases() {
        for mode in ExponentMode::ALL {
            let p0 = pollaczek(PollaczekArgs::new(0, c(0.4, -0.2), 1.0), mode).unwrap();
            assert_eq!(p0, c(1.0, 0.0));
        }
        // n = 1, z = 0, k = 1: i·√2·2F1(−1, 1; 2; 2) = i·√2·0
        let f = hyp2f1_terminating(1, c(1.0, 0.0), 2.0, 2.0).unwrap();
        let expected = c(0.0, 1.0) * 2f64.sqrt() * f;
        let got = pollaczek(PollaczekArgs::new(1, c(0.0, 0.0), 1.0), ExponentMode::Half).unwrap();
        assert!((got - expected).norm() < 1e-15);
        assert!(got.norm() < 1e-15);
    }

    #[test]
    fn pollaczek_matches_recurrence_solution() {
        // n = 2, z = 0.7, k = 0.5 against the recurrence run from d_0 = 1
        let (z, k) = (c(0.7, 0.0), 0.5f64);
        let d1 = z * 2.0 / (2.0 * k).sqrt();
        let d2 = (2.0 * z * d1 - (2.0 * k).sqrt() * c(1.0, 0.0)) / (2.0 * (1.0 + 2.0 * k)).sqrt();
        let got = pollaczek(PollaczekArgs::new(2, z, k), ExponentMode::Half).unwrap();
        assert!(close(got, d2, 1e-14), "{got} vs {d2}");
    }

    #[test]
    fn spin_polynomial_solves_spin_recurrence() {
        for &j in &[0.5, 1.0, 2.5, 7.0] {
            let dim = spin_dimension(j).unwrap();
            let z = c(0.37, 0.1);
            let d: Vec<_> = (0..dim)
                .map(|n| pollaczek_spin(PollaczekArgs::new(n, z, j), ExponentMode::Half).unwrap())
                .collect();
            assert_eq!(d[0], c(1.0, 0.0));
            // interior rows only: the top row holds only at admissible z
            for n in 0..dim - 1 {
                let nf = n as f64;
                let up = 0.5 * ((nf + 1.0) * (2.0 * j - nf)).sqrt() * d[n + 1];
                let down = if n == 0 { c(0.0, 0.0) } else { 0.5 * (nf * (2.0 * j - nf + 1.0)).sqrt() * d[n - 1] };
                let scale = d[n].norm().max(d[n + 1].norm()).max(1e-300);
                assert!((up + down - z * d[n]).norm() < 1e-12 * scale, "j={j} n={n}");
            }
        }
        assert!(pollaczek_spin(PollaczekArgs::new(3, c(0.0, 0.0), 1.0), ExponentMode::Half).is_err());
        assert!(pollaczek_spin(PollaczekArgs::new(0, c(0.0, 0.0), 0.3), ExponentMode::Half).is_err());
    }

    #[test]
    fn half_mode_wins_arbitration() {
        let report = arbitrate_exponent_mode(10, 30, 7).unwrap();
        assert_eq!(report.winner, Some(ExponentMode::Half));
        assert!(report.worst_paper > 1e-3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn conjugation_symmetry(n in 0usize..25, br in -3.0f64..3.0, bi in -3.0f64..3.0, cc in 0.1f64..5.0) {
            let v = hyp2f1_terminating(n, c(br, bi), cc, 2.0).unwrap();
            let w = hyp2f1_terminating(n, c(br, -bi), cc, 2.0).unwrap();
            prop_assert!((v.conj() - w).norm() <= 1e-13 * v.norm().max(1e-300));
        }
    }
}
