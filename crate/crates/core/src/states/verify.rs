use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ladder_combination, IsParams, StateVector};
use crate::error::{Error, Result};
use crate::repr::{Realization, RepresentationSpec};

/// Residuals and uncertainty data for one state.
///
/// The uncertainty fields are `None` when the state lives in the Dyson
/// realization at `q ≠ 1`: its ladders are not mutually adjoint, so
/// `X₁`, `X₂` built from them are not Hermitian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// `‖(α·lower + β·raise)ψ − 2ηψ‖ / ‖ψ‖` with the state's own matrices.
    pub eigen_residual: f64,
    /// Same, against the adjoint (symmetric) realization's matrices.
    pub adjoint_eigen_residual: f64,
    pub uncertainty_applicable: bool,
    pub var_x1: Option<f64>,
    pub var_x2: Option<f64>,
    pub commutator_expectation: Option<Complex64>,
    /// `|ΔX₁²ΔX₂² − ¼|⟨[X₁,X₂]⟩|²|`
    pub saturation_gap: Option<f64>,
    /// `saturation_gap / (¼|⟨[X₁,X₂]⟩|²)`
    pub relative_saturation_gap: Option<f64>,
    /// `ΔXᵢ² < ½|⟨[X₁,X₂]⟩|`
    pub squeezed_x1: Option<bool>,
    pub squeezed_x2: Option<bool>,
    /// `|ΔX₁²/ΔX₂² − λ²|`
    pub lambda_ratio_check: Option<f64>,
    /// Relative deviation of `ΔX₁²` from `(λ/2)|⟨[X₁,X₂]⟩|`.
    pub partition_x1: Option<f64>,
    /// Relative deviation of `ΔX₂²` from `|⟨[X₁,X₂]⟩|/(2λ)`.
    pub partition_x2: Option<f64>,
    pub tail: f64,
    pub converged: bool,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Euclidean norm, scaled so that entries near the top of the f64 range do not overflow.
fn norm(a: &[Complex64]) -> f64 {
    let max = a.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if max == 0.0 || !max.is_finite() {
        return max;
    }
    max * a.iter().map(|x| (x / max).norm_sqr()).sum::<f64>().sqrt()
}

fn residual_in(spec: &RepresentationSpec, state: &StateVector, params: &IsParams) -> Result<f64> {
    let (lower, raise) = spec.ladder_elements()?;
    let applied = ladder_combination(params.alpha, params.beta, &lower, &raise, &state.coeffs);
    let diff: Vec<Complex64> = applied
        .iter()
        .zip(&state.coeffs)
        .map(|(a, c)| a - 2.0 * params.eta * c)
        .collect();
    Ok(norm(&diff) / norm(&state.coeffs))
}

fn check_dim(state: &StateVector) -> Result<()> {
    if state.coeffs.len() != state.spec.dim() {
        return Err(Error::Internal(format!(
            "state has {} coefficients, basis has {}",
            state.coeffs.len(),
            state.spec.dim()
        )));
    }
    Ok(())
}

/// Relative eigen-residual of `state` in its own basis, with `λ` and `η` from `params`.
pub fn eigen_residual(state: &StateVector, params: &IsParams) -> Result<f64> {
    check_dim(state)?;
    residual_in(&state.spec, state, params)
}

/// Measures `state` against the intelligent-state conditions of `params`.
///
/// The basis is the state's own (a solver may have enlarged the truncation);
/// `λ` and `η` come from `params`. Variances are `‖(X − ⟨X⟩)ψ‖²` and
/// `⟨[X₁,X₂]⟩ = ⟨X₁ψ, X₂ψ⟩ − ⟨X₂ψ, X₁ψ⟩`, with `X₁ = (R + L)/2` and
/// `X₂ = (R − L)/(2i)` from the adjoint realization.
pub fn verify(state: &StateVector, params: &IsParams) -> Result<VerificationReport> {
    check_dim(state)?;
    let spec = &state.spec;
    let eigen_residual = residual_in(spec, state, params)?;
    let dyson_deformed = spec.realization == Realization::DysonPaper && !spec.q.is_undeformed();
    let adjoint = if dyson_deformed {
        let mut s = spec.clone();
        s.realization = Realization::Symmetric;
        s
    } else {
        spec.clone()
    };
    let adjoint_eigen_residual = if dyson_deformed {
        residual_in(&adjoint, state, params)?
    } else {
        eigen_residual
    };

    let mut report = VerificationReport {
        eigen_residual,
        adjoint_eigen_residual,
        uncertainty_applicable: !dyson_deformed,
        var_x1: None,
        var_x2: None,
        commutator_expectation: None,
        saturation_gap: None,
        relative_saturation_gap: None,
        squeezed_x1: None,
        squeezed_x2: None,
        lambda_ratio_check: None,
        partition_x1: None,
        partition_x2: None,
        tail: state.tail,
        converged: state.converged,
    };
    if dyson_deformed {
        return Ok(report);
    }

    let psi = &state.coeffs;
    let (lower, raise) = adjoint.ladder_elements()?;
    let r = ladder_combination(0.0, 1.0, &lower, &raise, psi);
    let l = ladder_combination(1.0, 0.0, &lower, &raise, psi);
    let x1: Vec<Complex64> = r.iter().zip(&l).map(|(a, b)| (a + b) / 2.0).collect();
    let x2: Vec<Complex64> = r
        .iter()
        .zip(&l)
        .map(|(a, b)| (a - b) / Complex64::new(0.0, 2.0))
        .collect();
    let norm_sq = dot(psi, psi).re;
    let variance = |x: &[Complex64]| {
        let mean = dot(psi, x) / norm_sq;
        let centered: Vec<Complex64> = x.iter().zip(psi).map(|(a, p)| a - mean * p).collect();
        dot(&centered, &centered).re / norm_sq
    };
    let v1 = variance(&x1);
    let v2 = variance(&x2);
    let commutator = (dot(&x1, &x2) - dot(&x2, &x1)) / norm_sq;
    let c = commutator.norm();
    let bound = 0.25 * c * c;
    let gap = (v1 * v2 - bound).abs();
    let lambda = params.lambda;
    let target1 = 0.5 * lambda * c;
    let target2 = c / (2.0 * lambda);

    report.var_x1 = Some(v1);
    report.var_x2 = Some(v2);
    report.commutator_expectation = Some(commutator);
    report.saturation_gap = Some(gap);
    report.relative_saturation_gap = Some(gap / bound);
    report.squeezed_x1 = Some(v1 < 0.5 * c);
    report.squeezed_x2 = Some(v2 < 0.5 * c);
    report.lambda_ratio_check = Some((v1 / v2 - lambda * lambda).abs());
    report.partition_x1 = Some((v1 - target1).abs() / target1);
    report.partition_x2 = Some((v2 - target2).abs() / target2);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{solve_by_diagonalization, solve_recurrence, DEFAULT_TAIL_TOLERANCE};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn lowest_weight_state() {
        let spec = RepresentationSpec::discrete_series(1.0, 16).unwrap();
        let p = IsParams::new(1.0, c(0.0), spec).unwrap();
        let s = solve_recurrence(&p).unwrap();
        let r = verify(&s, &p).unwrap();
        assert!((r.var_x1.unwrap() - 0.5).abs() < 1e-15);
        assert!((r.var_x2.unwrap() - 0.5).abs() < 1e-15);
        // [K₁, K₂] = −iK₀ and ⟨K₀⟩ = k = 1
        assert!((r.commutator_expectation.unwrap() - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!(r.saturation_gap.unwrap() < 1e-12);
        assert_eq!(r.eigen_residual, 0.0);
    }

    #[test]
    fn spin_half_eigenstates_saturate() {
        let lambda = 0.5;
        let spec = RepresentationSpec::spin(0.5).unwrap();
        for pair in solve_by_diagonalization(&spec, lambda).unwrap() {
            let p = IsParams::new(lambda, pair.eta, spec.clone()).unwrap();
            let r = verify(&pair.state, &p).unwrap();
            assert!(r.saturation_gap.unwrap() < 1e-12);
            let ratio = r.var_x1.unwrap() / r.var_x2.unwrap();
            assert!((ratio - lambda * lambda).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_superposition_does_not_saturate() {
        // ψ = (|0⟩ + |1⟩ + |2⟩)/√3 for j = 1: ⟨J₁⟩ = 2√2/3, ⟨J₁²⟩ = 1, so
        // ΔJ₁² = 1/9; ΔJ₂² = 1/3; ⟨[J₁,J₂]⟩ = i⟨J₀⟩ = 0, so the gap is 1/27
        let spec = RepresentationSpec::spin(1.0).unwrap();
        let s = StateVector::from_unnormalized(vec![c(1.0); 3], spec.clone(), DEFAULT_TAIL_TOLERANCE).unwrap();
        let p = IsParams::new(0.5, c(0.0), spec).unwrap();
        let r = verify(&s, &p).unwrap();
        assert!((r.var_x1.unwrap() - 1.0 / 9.0).abs() < 1e-15);
        assert!((r.var_x2.unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(r.commutator_expectation.unwrap().norm() < 1e-15);
        assert!((r.saturation_gap.unwrap() - 1.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn dyson_deformed_marks_uncertainty_not_applicable() {
        let spec = RepresentationSpec::discrete_series(1.0, 64)
            .unwrap()
            .deformed(1.25, Realization::DysonPaper)
            .unwrap();
        let p = IsParams::new(0.5, c(0.3), spec).unwrap();
        let s = solve_recurrence(&p).unwrap();
        let r = verify(&s, &p).unwrap();
        assert!(!r.uncertainty_applicable);
        assert!(r.var_x1.is_none() && r.saturation_gap.is_none());
        assert!(r.eigen_residual.is_finite() && r.adjoint_eigen_residual.is_finite(), "{} {} {}", r.eigen_residual, r.adjoint_eigen_residual, s.dim());
        assert_ne!(r.adjoint_eigen_residual, r.eigen_residual);
        let json = serde_json::to_value(&r).unwrap();
        assert!(json["var_x1"].is_null());
    }

    #[test]
    fn squeezing_follows_lambda() {
        let spec = RepresentationSpec::discrete_series(1.0, 512).unwrap();
        for &(lambda, x1) in &[(0.3, true), (0.7, true), (1.5, false), (3.0, false)] {
            let p = IsParams::new(lambda, c(0.05), spec.clone()).unwrap();
            // for λ > 1, β < 0 but |β/α| < 1 still gives a decaying state
            let s = solve_recurrence(&p).unwrap();
            let r = verify(&s, &p).unwrap();
            assert!(s.converged, "λ={lambda}");
            assert_eq!(r.squeezed_x1.unwrap(), x1, "λ={lambda}");
            assert_eq!(r.squeezed_x2.unwrap(), !x1, "λ={lambda}");
        }
    }
}
