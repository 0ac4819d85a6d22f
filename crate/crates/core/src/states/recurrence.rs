use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{IsParams, StateVector, DEFAULT_TAIL_TOLERANCE};
use crate::error::{domain, Error, Result};
use crate::repr::RepresentationSpec;

/// Truncation control for [`solve_recurrence_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceOptions {
    pub tail_tolerance: f64,
    /// Largest truncation reached by doubling.
    pub max_truncation: usize,
    /// Double the truncation while the tail check fails.
    pub auto_extend: bool,
}

impl Default for RecurrenceOptions {
    fn default() -> Self {
        Self {
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
            max_truncation: 4096,
            auto_extend: true,
        }
    }
}

/// Above this modulus the partial solution is rescaled.
const RESCALE_ABOVE: f64 = 1e100;

fn run(params: &IsParams, spec: &RepresentationSpec, tail_tolerance: f64) -> Result<StateVector> {
    let dim = spec.dim();
    let (lower, raise) = spec.ladder_elements()?;
    if !lower.iter().chain(&raise).all(|v| v.is_finite()) {
        return Err(domain(format!(
            "ladder elements overflow double precision at truncation {dim}"
        )));
    }
    let two_eta = 2.0 * params.eta;
    let mut c = Vec::with_capacity(dim);
    c.push(Complex64::new(1.0, 0.0));
    for n in 0..dim - 1 {
        // α·⟨n|L|n+1⟩·c_{n+1} = 2η·c_n − β·⟨n|R|n−1⟩·c_{n−1}
        let lead = params.alpha * lower[n + 1];
        if lead == 0.0 {
            return Err(Error::Internal(format!("vanishing leading coefficient at n = {n}")));
        }
        let mut rhs = two_eta * c[n];
        if n >= 1 {
            rhs -= params.beta * raise[n - 1] * c[n - 1];
        }
        let next = rhs / lead;
        if !(next.re.is_finite() && next.im.is_finite()) {
            return Err(Error::Internal(format!("recurrence overflow at n = {}", n + 1)));
        }
        c.push(next);
        if next.norm() > RESCALE_ABOVE {
            let s = 1.0 / next.norm();
            c.iter_mut().for_each(|v| *v *= s);
        }
    }
    StateVector::from_unnormalized(c, spec.clone(), tail_tolerance)
}

/// Runs the recurrence with [`RecurrenceOptions::default`].
pub fn solve_recurrence(params: &IsParams) -> Result<StateVector> {
    solve_recurrence_with(params, &RecurrenceOptions::default())
}

/// Seeds `c₀ = 1` and runs the three-term recurrence of the selected
/// representation up to the last basis state, then normalizes.
///
/// For the discrete series a failed tail check doubles the truncation (up to
/// `max_truncation`) when `auto_extend` is set; the returned state carries the
/// spec it was solved in. A state whose tail never drops below tolerance is
/// returned flagged with `converged = false`, as is the last representable
/// state when a larger truncation would overflow the matrix elements.
pub fn solve_recurrence_with(params: &IsParams, opts: &RecurrenceOptions) -> Result<StateVector> {
    let mut spec = params.spec.clone();
    let mut state = run(params, &spec, opts.tail_tolerance)?;
    loop {
        let next = spec.truncation * 2;
        if state.converged || !opts.auto_extend || !spec.is_truncated() || next > opts.max_truncation {
            return Ok(state);
        }
        spec = spec.with_truncation(next)?;
        match run(params, &spec, opts.tail_tolerance) {
            Ok(s) => state = s,
            Err(_) => return Ok(state),
        }
    }
}
