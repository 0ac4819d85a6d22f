use num_complex::Complex64;

use super::{IsParams, StateVector, DEFAULT_TAIL_TOLERANCE};
use crate::error::{domain, Result};
use crate::repr::Branch;
use crate::special::{pollaczek, pollaczek_spin, ExponentMode, PollaczekArgs};

/// `(α_q, β_q)` at degree `n`.
///
/// Discrete series: `α√([n+1]/(n+1))`, `β√([n]/n)·[n+2k−1]/(n+2k−1)`.
/// Spin: `α√([n+1]/(n+1))`, `β√([n]/n)·(2j−n+1)/[2j−n+1]`.
/// Both reduce to `(α, β)` at `q = 1`.
fn deformed_pair(params: &IsParams, n: usize) -> (f64, f64) {
    let spec = &params.spec;
    let q = spec.q;
    let nf = n as f64;
    let a = params.alpha * q.bracket_ratio(nf + 1.0).sqrt();
    let b = params.beta * q.bracket_ratio(nf).sqrt();
    let b = match spec.branch {
        Branch::DiscreteSeries => b * q.bracket_ratio(nf + 2.0 * spec.index - 1.0),
        Branch::Spin => b / q.bracket_ratio(2.0 * spec.index - nf + 1.0),
    };
    (a, b)
}

/// Pollaczek-form coefficients `c_n = (β_q/α_q)^{n/2}·d_n`,
/// `d_n = P_n(η/√(α_q β_q))`, with the per-`n` factors evaluated literally.
///
/// At `q = 1` this solves the recurrence exactly. At `q ≠ 1` the factors vary
/// with `n`, so the result is only a formal solution; compare it with
/// [`super::solve_recurrence`] through [`ratio_deviation`].
pub fn solve_closed_form(params: &IsParams, mode: ExponentMode) -> Result<StateVector> {
    let spec = &params.spec;
    let dim = spec.dim();
    let mut coeffs = Vec::with_capacity(dim);
    for n in 0..dim {
        let (a, b) = deformed_pair(params, n);
        let product = a * b;
        if product.is_nan() || product <= 0.0 {
            return Err(domain(format!(
                "α_q·β_q = {} ≤ 0 at n = {n} (λ = {}); use the recurrence solver",
                a * b,
                params.lambda
            )));
        }
        let z = params.eta / (a * b).sqrt();
        let args = PollaczekArgs::new(n, z, spec.index);
        let d = match spec.branch {
            Branch::DiscreteSeries => pollaczek(args, mode)?,
            Branch::Spin => pollaczek_spin(args, mode)?,
        };
        coeffs.push((0.5 * n as f64 * (b / a).ln()).exp() * d);
    }
    StateVector::from_unnormalized(coeffs, spec.clone(), DEFAULT_TAIL_TOLERANCE)
}

/// `max_{n < n_max} |c_{n+1}/c_n − c'_{n+1}/c'_n| / max(1, |c'_{n+1}/c'_n|)`.
///
/// Ratios are phase free, so the two states need no alignment. A pair of
/// vanishing coefficients counts as agreement; a single one as a deviation of 1.
pub fn ratio_deviation(state: &StateVector, reference: &StateVector, n_max: usize) -> f64 {
    let len = state.dim().min(reference.dim());
    let ratio = |c: &[Complex64], n: usize| -> Option<Complex64> {
        (c[n].norm() > 0.0).then(|| c[n + 1] / c[n])
    };
    let mut worst: f64 = 0.0;
    for n in 0..n_max.min(len.saturating_sub(1)) {
        let dev = match (ratio(&state.coeffs, n), ratio(&reference.coeffs, n)) {
            (Some(a), Some(b)) => (a - b).norm() / b.norm().max(1.0),
            (None, None) => 0.0,
            _ => 1.0,
        };
        worst = worst.max(if dev.is_nan() { f64::INFINITY } else { dev });
    }
    worst
}
