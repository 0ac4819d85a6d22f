use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{StateVector, DEFAULT_TAIL_TOLERANCE};
use crate::error::{domain, Error, Result};
use crate::repr::RepresentationSpec;

/// Largest basis accepted by [`solve_by_diagonalization`].
pub const MAX_DIAGONALIZATION_DIM: usize = 5000;

/// One eigenvalue `2η` of `α·lower + β·raise` and its eigenvector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub eta: Complex64,
    pub state: StateVector,
}

/// Full eigensystem of the truncated `α·lower + β·raise`, `α = 1 + λ`, `β = 1 − λ`.
///
/// The tridiagonal matrix is first balanced by an exact diagonal similarity
/// `D·A·D⁻¹` with equal-modulus off-diagonal pairs; for `λ < 1` the raw
/// eigenvectors decay geometrically, which the balanced problem does not see.
/// The weights live in log space and are undone on the way out.
///
/// Pairs are sorted by `(Re η, Im η)`. Eigenvectors are normalized with the
/// first significant coefficient real positive; they need not be orthogonal.
pub fn solve_by_diagonalization(spec: &RepresentationSpec, lambda: f64) -> Result<Vec<Eigenpair>> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(domain(format!("lambda must be > 0, got {lambda}")));
    }
    spec.validate()?;
    let dim = spec.dim();
    if dim > MAX_DIAGONALIZATION_DIM {
        return Err(domain(format!(
            "dimension {dim} exceeds the diagonalization limit {MAX_DIAGONALIZATION_DIM}"
        )));
    }
    let (alpha, beta) = (1.0 + lambda, 1.0 - lambda);
    let (lower, raise) = spec.ladder_elements()?;

    // A[n−1][n] = α·lower[n], A[n][n−1] = β·raise[n−1]
    let mut log_w = vec![0.0; dim];
    let mut sup = vec![0.0; dim];
    let mut sub = vec![0.0; dim];
    for n in 1..dim {
        let (s, b) = (alpha * lower[n], beta * raise[n - 1]);
        let step = if s != 0.0 && b != 0.0 {
            let g = (s.abs() * b.abs()).sqrt();
            sup[n] = g * s.signum();
            sub[n] = g * b.signum();
            0.5 * (s.abs().ln() - b.abs().ln())
        } else {
            sup[n] = s;
            sub[n] = b;
            0.0
        };
        log_w[n] = log_w[n - 1] + step;
    }
    let balanced = Mat::<Complex64>::from_fn(dim, dim, |i, j| {
        let v = if j == i + 1 {
            sup[j]
        } else if i == j + 1 {
            sub[i]
        } else {
            0.0
        };
        Complex64::new(v, 0.0)
    });

    let eigen = balanced.eigen().map_err(|e| {
        let entries = sup.iter().chain(&sub).map(|v| v.abs()).filter(|v| *v > 0.0);
        let (lo, hi) = entries.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        Error::Eigen(format!("eigensolver failed on a {dim}×{dim} matrix (|entries| in [{lo:e}, {hi:e}]): {e:?}"))
    })?;
    let values = eigen.S().column_vector();
    let vectors = eigen.U();

    let mut pairs = Vec::with_capacity(dim);
    for i in 0..dim {
        let lambda_i = values[i];
        if !(lambda_i.re.is_finite() && lambda_i.im.is_finite()) {
            return Err(Error::Eigen(format!("non-finite eigenvalue {lambda_i} at index {i}")));
        }
        // c_n = u_n·e^{−w_n}, rescaled by the largest log-magnitude
        let logs: Vec<f64> = (0..dim).map(|n| vectors[(n, i)].norm().ln() - log_w[n]).collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<Complex64> = (0..dim)
            .map(|n| {
                let u = vectors[(n, i)];
                if u.norm() == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    u / u.norm() * (logs[n] - top).exp()
                }
            })
            .collect();
        let state = StateVector::from_unnormalized(raw, spec.clone(), DEFAULT_TAIL_TOLERANCE)?;
        pairs.push(Eigenpair { eta: lambda_i / 2.0, state });
    }
    pairs.sort_by(|a, b| a.eta.re.total_cmp(&b.eta.re).then(a.eta.im.total_cmp(&b.eta.im)));
    Ok(pairs)
}
