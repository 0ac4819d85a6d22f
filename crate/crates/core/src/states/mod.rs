//! Intelligent states: eigenvectors of `K₁ − iλK₂` (resp. `J₁ − iλJ₂` and the
//! deformed generators), written in ladder form as
//!
//! ```text
//! (α·lower + β·raise) ψ = 2η ψ,    α = 1 + λ,  β = 1 − λ.
//! ```
//!
//! Three independent routes produce them:
//!
//! - [`solve_recurrence`]: forward three-term recurrence from `c₀ = 1`
//!   (the authoritative constructor);
//! - [`solve_closed_form`]: Pollaczek / terminating `2F1` coefficients;
//! - [`solve_by_diagonalization`]: full eigensystem of the truncated matrix.
//!
//! [`verify`] measures eigen-residuals and the Robertson saturation.

mod closed_form;
mod diag;
mod recurrence;
mod verify;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::repr::RepresentationSpec;

pub use closed_form::{ratio_deviation, solve_closed_form};
pub use diag::{solve_by_diagonalization, Eigenpair, MAX_DIAGONALIZATION_DIM};
pub use recurrence::{solve_recurrence, solve_recurrence_with, RecurrenceOptions};
pub use verify::{eigen_residual, verify, VerificationReport};

/// Default bound on `|c_{N−1}|²` for a truncated state to count as converged.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

/// One intelligent-state problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct IsParams {
    pub lambda: f64,
    pub eta: Complex64,
    pub spec: RepresentationSpec,
    /// `1 + λ`
    pub alpha: f64,
    /// `1 − λ`
    pub beta: f64,
}

#[derive(Deserialize)]
struct RawParams {
    lambda: f64,
    eta: Complex64,
    spec: RepresentationSpec,
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawParams> for IsParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        let params = IsParams::new(raw.lambda, raw.eta, raw.spec)?;
        if params.alpha != raw.alpha || params.beta != raw.beta {
            return Err(domain("alpha and beta must equal 1 + lambda and 1 − lambda"));
        }
        Ok(params)
    }
}

impl IsParams {
    pub fn new(lambda: f64, eta: Complex64, spec: RepresentationSpec) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(domain(format!("lambda must be > 0, got {lambda}")));
        }
        if !(eta.re.is_finite() && eta.im.is_finite()) {
            return Err(domain(format!("eta must be finite, got {eta}")));
        }
        spec.validate()?;
        Ok(Self {
            lambda,
            eta,
            spec,
            alpha: 1.0 + lambda,
            beta: 1.0 - lambda,
        })
    }

    pub fn with_eta(&self, eta: Complex64) -> Result<Self> {
        Self::new(self.lambda, eta, self.spec.clone())
    }
}

/// `α·L·ψ + β·R·ψ` from the stripes `lower[n] = ⟨n−1|L|n⟩`, `raise[n] = ⟨n+1|R|n⟩`.
///
/// α multiplies the lowering operator in both branches. Expanding
/// `K₁ − iλK₂` with `K± = K₁ ± iK₂` gives `(αK₋ + βK₊)/2`, which is also the
/// operator whose eigen-equation is the coefficient recurrence
/// `α·⟨n|L|n+1⟩·c_{n+1} + β·⟨n|R|n−1⟩·c_{n−1} = 2η·c_n`. With `λ ∈ (0, 1)` this
/// orientation gives decaying, normalizable coefficients.
pub(crate) fn ladder_combination(
    alpha: f64,
    beta: f64,
    lower: &[f64],
    raise: &[f64],
    psi: &[Complex64],
) -> Vec<Complex64> {
    let dim = psi.len();
    (0..dim)
        .map(|n| {
            let mut v = Complex64::new(0.0, 0.0);
            if n + 1 < dim {
                v += alpha * lower[n + 1] * psi[n + 1];
            }
            if n >= 1 {
                v += beta * raise[n - 1] * psi[n - 1];
            }
            v
        })
        .collect()
}

/// Normalized coefficients `c_n` of a state in the basis of `spec`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub coeffs: Vec<Complex64>,
    /// `Σ|c_n|² / |c_ref|²` before normalization, where `c_ref` is the
    /// coefficient whose phase was fixed (`c₀` for every intelligent state).
    pub norm_sq_inverse: f64,
    /// `|c_{N−1}|²` after normalization; zero for spin.
    pub tail: f64,
    pub tail_tolerance: f64,
    pub converged: bool,
    pub spec: RepresentationSpec,
}

impl StateVector {
    /// Normalizes `raw` and fixes its global phase: the first coefficient with
    /// `|c| > 1e−12·max|c|` becomes real positive.
    pub fn from_unnormalized(
        raw: Vec<Complex64>,
        spec: RepresentationSpec,
        tail_tolerance: f64,
    ) -> Result<Self> {
        if raw.len() != spec.dim() {
            return Err(Error::Internal(format!(
                "{} coefficients for a {}-dimensional basis",
                raw.len(),
                spec.dim()
            )));
        }
        let max = raw.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if !(max.is_finite() && max > 0.0) {
            return Err(Error::Internal("state has no finite nonzero coefficient".into()));
        }
        // rescale first so the squared norm cannot overflow
        let scaled: Vec<Complex64> = raw.iter().map(|c| c / max).collect();
        let norm_sq: f64 = scaled.iter().map(|c| c.norm_sqr()).sum();
        let reference = scaled
            .iter()
            .copied()
            .find(|c| c.norm() > 1e-12)
            .expect("max-normalized vector has an entry of modulus 1");
        let phase = reference.conj() / reference.norm();
        let norm = norm_sq.sqrt();
        let coeffs: Vec<Complex64> = scaled.iter().map(|c| c * phase / norm).collect();
        let (tail, converged) = if spec.is_truncated() {
            let tail = coeffs.last().map_or(0.0, |c| c.norm_sqr());
            (tail, tail < tail_tolerance)
        } else {
            (0.0, true)
        };
        Ok(Self {
            coeffs,
            norm_sq_inverse: norm_sq / reference.norm_sqr(),
            tail,
            tail_tolerance,
            converged,
            spec,
        })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// `|⟨self|other⟩|`; both states are normalized, so 1 means equal up to phase.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        let n = self.dim().min(other.dim());
        self.coeffs[..n]
            .iter()
            .zip(&other.coeffs[..n])
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm()
    }

    /// Coefficient table rows `(n, re, im, |c|²)`.
    pub fn table(&self) -> impl Iterator<Item = (usize, f64, f64, f64)> + '_ {
        self.coeffs.iter().enumerate().map(|(n, c)| (n, c.re, c.im, c.norm_sqr()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        let spec = RepresentationSpec::discrete_series(1.0, 16).unwrap();
        assert!(IsParams::new(0.0, Complex64::new(0.1, 0.0), spec.clone()).is_err());
        assert!(IsParams::new(-0.5, Complex64::new(0.1, 0.0), spec.clone()).is_err());
        assert!(IsParams::new(0.5, Complex64::new(f64::NAN, 0.0), spec.clone()).is_err());
        let p = IsParams::new(0.25, Complex64::new(0.1, 0.0), spec).unwrap();
        assert_eq!((p.alpha, p.beta), (1.25, 0.75));
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<IsParams>(&json).unwrap(), p);
        let tampered = json.replace("\"beta\":0.75", "\"beta\":0.5");
        assert!(serde_json::from_str::<IsParams>(&tampered).is_err());
    }

    #[test]
    fn normalization_and_phase() {
        let spec = RepresentationSpec::spin(1.0).unwrap();
        let raw = vec![Complex64::new(0.0, 2.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let s = StateVector::from_unnormalized(raw, spec, DEFAULT_TAIL_TOLERANCE).unwrap();
        let total: f64 = s.coeffs.iter().map(|c| c.norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert!(s.coeffs[0].im == 0.0 && s.coeffs[0].re > 0.0);
        assert!((s.norm_sq_inverse - 1.25).abs() < 1e-15);
        assert!(s.converged && s.tail == 0.0);
    }
}
