//! Truncated matrix representations of the ladder operators.
//!
//! Basis states are labelled `n = 0, 1, …, dim−1`:
//!
//! - discrete series: `|n, k⟩` with weight `n + k`, truncated at `N_max` states;
//! - spin: `|j, n − j⟩` with weight `n − j`, `dim = 2j + 1`.
//!
//! A ladder operator has a single off-diagonal stripe. `lower[n] = ⟨n−1|L|n⟩`
//! and `raise[n] = ⟨n+1|R|n⟩`; `lower[0]` and `raise[dim−1]` are zero. For the
//! discrete series the raising element out of the last retained state is
//! dropped, so relations involving `R·L` or `L·R` fail on the last basis state
//! only and all algebra checks exclude it.

use std::io::{self, Write};

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::qnum::DeformationParameter;
use crate::special::spin_dimension;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Positive discrete series of su(1,1), Bargmann index `k > 0`.
    DiscreteSeries,
    /// Spin-`j` representation of su(2).
    Spin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Realization {
    /// Undeformed generators; requires `q = 1`.
    Undeformed,
    /// Dyson realization with the printed matrix elements, e.g.
    /// `Q₋|n⟩ = √([n]_q(n+2k−1))|n−1⟩`,
    /// `Q₊|n⟩ = √([n+1]_q(n+2k))·[n+2k]_q/(n+2k)|n+1⟩`.
    /// `Q₊` and `Q₋` are not mutually adjoint for `q ≠ 1`.
    DysonPaper,
    /// Fully deformed radicands `√([n]_q[n+2k−1]_q)` on both ladders, so
    /// `Q₊ = Q₋†`.
    #[default]
    Symmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct RepresentationSpec {
    pub branch: Branch,
    /// `k` for the discrete series, `j` for spin.
    pub index: f64,
    /// Number of basis states kept; always `2j + 1` for spin.
    pub truncation: usize,
    pub q: DeformationParameter,
    pub realization: Realization,
}

#[derive(Deserialize)]
struct RawSpec {
    branch: Branch,
    index: f64,
    truncation: usize,
    q: DeformationParameter,
    realization: Realization,
}

impl TryFrom<RawSpec> for RepresentationSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let spec = RepresentationSpec {
            branch: raw.branch,
            index: raw.index,
            truncation: raw.truncation,
            q: raw.q,
            realization: raw.realization,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl RepresentationSpec {
    /// Undeformed discrete series with Bargmann index `k`, truncated to `truncation` states.
    pub fn discrete_series(k: f64, truncation: usize) -> Result<Self> {
        let spec = Self {
            branch: Branch::DiscreteSeries,
            index: k,
            truncation,
            q: DeformationParameter::UNDEFORMED,
            realization: Realization::Undeformed,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Undeformed spin-`j` representation.
    pub fn spin(j: f64) -> Result<Self> {
        let dim = spin_dimension(j)?;
        let spec = Self {
            branch: Branch::Spin,
            index: j,
            truncation: dim,
            q: DeformationParameter::UNDEFORMED,
            realization: Realization::Undeformed,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Same representation with deformation `q` in the given realization.
    pub fn deformed(mut self, q: f64, realization: Realization) -> Result<Self> {
        self.q = DeformationParameter::new(q)?;
        self.realization = realization;
        self.validate()?;
        Ok(self)
    }

    /// Same representation with a different truncation (discrete series only).
    pub fn with_truncation(mut self, truncation: usize) -> Result<Self> {
        if self.branch == Branch::Spin {
            return Err(domain("spin representations have a fixed dimension 2j+1"));
        }
        self.truncation = truncation;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        match self.branch {
            Branch::DiscreteSeries => {
                if !(self.index.is_finite() && self.index > 0.0) {
                    return Err(domain(format!("Bargmann index must be k > 0, got {}", self.index)));
                }
                if self.truncation < 2 {
                    return Err(domain(format!("truncation must be at least 2, got {}", self.truncation)));
                }
            }
            Branch::Spin => {
                let dim = spin_dimension(self.index)?;
                if self.truncation != dim {
                    return Err(domain(format!(
                        "spin {} has dimension {dim}, not {}",
                        self.index, self.truncation
                    )));
                }
            }
        }
        if self.realization == Realization::Undeformed && !self.q.is_undeformed() {
            return Err(domain(format!(
                "undeformed realization requires q = 1, got q = {}",
                self.q.get()
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.truncation
    }

    /// Whether the basis is a truncation of an infinite representation.
    pub fn is_truncated(&self) -> bool {
        self.branch == Branch::DiscreteSeries
    }

    /// Eigenvalue of the diagonal generator on basis state `n`.
    pub fn weight(&self, n: usize) -> f64 {
        match self.branch {
            Branch::DiscreteSeries => n as f64 + self.index,
            Branch::Spin => n as f64 - self.index,
        }
    }

    /// Sign `s` in `[raise, lower] = s·(deformed 2·diag)`: −1 for su(1,1), +1 for su(2).
    pub fn commutator_sign(&self) -> f64 {
        match self.branch {
            Branch::DiscreteSeries => -1.0,
            Branch::Spin => 1.0,
        }
    }

    /// Casimir eigenvalue of the undeformed representation: `k(k−1)` or `j(j+1)`.
    pub fn casimir_value(&self) -> f64 {
        match self.branch {
            Branch::DiscreteSeries => self.index * (self.index - 1.0),
            Branch::Spin => self.index * (self.index + 1.0),
        }
    }

    /// Ladder matrix elements `(lower, raise)` of this realization.
    pub fn ladder_elements(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let dim = self.dim();
        let q = self.q;
        let mut lower = vec![0.0; dim];
        let mut raise = vec![0.0; dim];
        // u(n) = n + 2k − 1 (discrete series) or 2j − n + 1 (spin): the second
        // factor of ⟨n−1|L|n⟩ and, shifted by one, of ⟨n+1|R|n⟩.
        let partner = |n: f64| match self.branch {
            Branch::DiscreteSeries => n + 2.0 * self.index - 1.0,
            Branch::Spin => 2.0 * self.index - n + 1.0,
        };
        for (n, slot) in lower.iter_mut().enumerate().skip(1) {
            let nf = n as f64;
            let u = partner(nf);
            let (a, b) = match self.realization {
                Realization::Undeformed => (nf, u),
                Realization::DysonPaper => (q.bracket(nf), u),
                Realization::Symmetric => (q.bracket(nf), q.bracket(u)),
            };
            *slot = radical(a, b, n, "lowering")?;
        }
        for (n, slot) in raise.iter_mut().enumerate().take(dim - 1) {
            let nf = n as f64;
            let u = partner(nf + 1.0);
            *slot = match self.realization {
                Realization::Undeformed => radical(nf + 1.0, u, n, "raising")?,
                Realization::DysonPaper => {
                    radical(q.bracket(nf + 1.0), u, n, "raising")? * q.bracket_ratio(u)
                }
                Realization::Symmetric => radical(q.bracket(nf + 1.0), q.bracket(u), n, "raising")?,
            };
        }
        Ok((lower, raise))
    }
}

/// `√(a·b)` as `√a·√b`, so large q-brackets do not overflow the product.
fn radical(a: f64, b: f64, n: usize, which: &str) -> Result<f64> {
    if a.is_nan() || b.is_nan() || a < 0.0 || b < 0.0 {
        return Err(Error::Internal(format!(
            "negative radicand {a}·{b} in {which} element at n = {n}"
        )));
    }
    Ok(a.sqrt() * b.sqrt())
}

/// Which stripe of the matrix holds the entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stripe {
    Lowering,
    Diagonal,
    Raising,
}

/// A ladder or diagonal generator stored as its single nonzero stripe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorMatrix {
    pub dim: usize,
    pub stripe: Stripe,
    /// Basis state `n` has weight `n + weight_offset`.
    pub weight_offset: f64,
    /// Diagonal: `⟨n|D|n⟩`. Raising: `⟨n+1|R|n⟩`. Lowering: `⟨n−1|L|n⟩`.
    pub entries: Vec<Complex64>,
}

impl OperatorMatrix {
    fn from_real(stripe: Stripe, weight_offset: f64, values: &[f64]) -> Self {
        Self {
            dim: values.len(),
            stripe,
            weight_offset,
            entries: values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    /// `(row, col)` position of stripe entry `n`, if it lies inside the matrix.
    fn position(&self, n: usize) -> Option<(usize, usize)> {
        match self.stripe {
            Stripe::Diagonal => Some((n, n)),
            Stripe::Raising => (n + 1 < self.dim).then_some((n + 1, n)),
            Stripe::Lowering => (n >= 1).then(|| (n - 1, n)),
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let hit = match self.stripe {
            Stripe::Diagonal => row == col,
            Stripe::Raising => row == col + 1,
            Stripe::Lowering => row + 1 == col,
        };
        if hit && col < self.dim && row < self.dim {
            self.entries[col]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn to_dense(&self) -> Mat<Complex64> {
        let mut m = Mat::<Complex64>::zeros(self.dim, self.dim);
        for (n, &v) in self.entries.iter().enumerate() {
            if let Some((r, c)) = self.position(n) {
                m[(r, c)] = v;
            }
        }
        m
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "vector length does not match operator dimension");
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (n, (&e, &x)) in self.entries.iter().zip(v).enumerate() {
            if let Some((r, _)) = self.position(n) {
                out[r] += e * x;
            }
        }
        out
    }

    /// Number of stripe entries that can be nonzero.
    pub fn stripe_len(&self) -> usize {
        match self.stripe {
            Stripe::Diagonal => self.dim,
            _ => self.dim - 1,
        }
    }

    /// Dense row-major entries as `[re, im]` pairs.
    pub fn dense_rows(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| { let v = self.get(r, c); [v.re, v.im] }).collect())
            .collect()
    }

    /// JSON export: `{"stripe", "dim", "weight_offset", "rows": [[[re, im], …], …]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "stripe": self.stripe,
            "dim": self.dim,
            "weight_offset": self.weight_offset,
            "rows": self.dense_rows(),
        })
    }

    /// CSV export with header `row,col,re,im`, every dense entry in row-major order.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "row,col,re,im")?;
        for r in 0..self.dim {
            for c in 0..self.dim {
                let v = self.get(r, c);
                writeln!(w, "{r},{c},{},{}", v.re, v.im)?;
            }
        }
        Ok(())
    }
}

/// Diagonal, raising and lowering generators of one representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorTriple {
    pub spec: RepresentationSpec,
    pub diag: OperatorMatrix,
    pub raise: OperatorMatrix,
    pub lower: OperatorMatrix,
}

fn assemble(spec: &RepresentationSpec) -> Result<OperatorTriple> {
    spec.validate()?;
    let (lower, raise) = spec.ladder_elements()?;
    let offset = spec.weight(0);
    let weights: Vec<f64> = (0..spec.dim()).map(|n| spec.weight(n)).collect();
    Ok(OperatorTriple {
        spec: spec.clone(),
        diag: OperatorMatrix::from_real(Stripe::Diagonal, offset, &weights),
        raise: OperatorMatrix::from_real(Stripe::Raising, offset, &raise),
        lower: OperatorMatrix::from_real(Stripe::Lowering, offset, &lower),
    })
}

/// K₀, K₊, K₋ of the undeformed discrete series.
pub fn build_su11(spec: &RepresentationSpec) -> Result<OperatorTriple> {
    if spec.branch != Branch::DiscreteSeries || spec.realization != Realization::Undeformed {
        return Err(domain("build_su11 needs an undeformed discrete-series spec"));
    }
    assemble(spec)
}

/// J₀, J₊, J₋ of the undeformed spin-`j` representation.
pub fn build_su2(spec: &RepresentationSpec) -> Result<OperatorTriple> {
    if spec.branch != Branch::Spin || spec.realization != Realization::Undeformed {
        return Err(domain("build_su2 needs an undeformed spin spec"));
    }
    assemble(spec)
}

/// Q₀, Q₊, Q₋ in the Dyson or symmetric realization, either branch.
pub fn build_q_deformed(spec: &RepresentationSpec) -> Result<OperatorTriple> {
    if spec.realization == Realization::Undeformed {
        return Err(domain("build_q_deformed needs the dyson_paper or symmetric realization"));
    }
    assemble(spec)
}

/// Builds whichever family `spec` describes.
pub fn build(spec: &RepresentationSpec) -> Result<OperatorTriple> {
    assemble(spec)
}

/// Commutator residuals, each a max-norm over the checked block divided by
/// `max(1, max-norm of the reference operator)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgebraReport {
    /// `[diag, raise] − raise`
    pub diag_raise: f64,
    /// `[diag, lower] + lower`
    pub diag_lower: f64,
    /// `[raise, lower] − s·[2·diag]_q` with `s = −1` (su(1,1)) or `+1` (su(2)).
    pub raise_lower: f64,
    /// `[raise, lower] − s·2·[diag]_q`, the alternative reading of the deformed relation.
    pub raise_lower_scaled: f64,
    /// Leading block size checked (the truncation boundary is excluded).
    pub checked_dim: usize,
}

fn checked_dim(spec: &RepresentationSpec) -> usize {
    if spec.is_truncated() {
        spec.dim() - 1
    } else {
        spec.dim()
    }
}

fn block_residual(m: &Mat<Complex64>, target: &Mat<Complex64>, size: usize) -> f64 {
    let mut diff = 0.0f64;
    let mut scale = 1.0f64;
    for c in 0..size {
        for r in 0..size {
            diff = diff.max((m[(r, c)] - target[(r, c)]).norm());
            scale = scale.max(target[(r, c)].norm());
        }
    }
    diff / scale
}

fn diagonal(values: impl Iterator<Item = f64>, dim: usize) -> Mat<Complex64> {
    let mut m = Mat::<Complex64>::zeros(dim, dim);
    for (n, v) in values.enumerate().take(dim) {
        m[(n, n)] = Complex64::new(v, 0.0);
    }
    m
}

pub fn commutator_report(triple: &OperatorTriple) -> AlgebraReport {
    let spec = &triple.spec;
    let dim = spec.dim();
    let size = checked_dim(spec);
    let d = triple.diag.to_dense();
    let r = triple.raise.to_dense();
    let l = triple.lower.to_dense();

    let dr = &d * &r - &r * &d;
    let dl = &d * &l - &l * &d;
    let rl = &r * &l - &l * &r;
    let minus_l = Mat::<Complex64>::from_fn(dim, dim, |i, j| -l[(i, j)]);

    let s = spec.commutator_sign();
    let q = spec.q;
    let deformed = diagonal((0..dim).map(|n| s * q.bracket(2.0 * spec.weight(n))), dim);
    let scaled = diagonal((0..dim).map(|n| s * 2.0 * q.bracket(spec.weight(n))), dim);

    AlgebraReport {
        diag_raise: block_residual(&dr, &r, size),
        diag_lower: block_residual(&dl, &minus_l, size),
        raise_lower: block_residual(&rl, &deformed, size),
        raise_lower_scaled: block_residual(&rl, &scaled, size),
        checked_dim: size,
    }
}

/// Max-norm of `raise − lower†`. Zero to rounding for adjoint realizations.
pub fn hermiticity_report(triple: &OperatorTriple) -> f64 {
    let dim = triple.spec.dim();
    (0..dim.saturating_sub(1))
        .map(|n| (triple.raise.entries[n] - triple.lower.entries[n + 1].conj()).norm())
        .fold(0.0, f64::max)
}

/// Casimir residual at `q = 1` (where every realization has the same
/// matrices), relative to
/// `max(1, largest |w(w ± 1)|)`:
///
/// - spin: `J₀(J₀+1) + J₋J₊ − j(j+1)·I`, every state;
/// - discrete series: `K₀² − K₀ − K₊K₋ − k(k−1)·I`, boundary state excluded.
pub fn casimir_check(triple: &OperatorTriple) -> Result<f64> {
    let spec = &triple.spec;
    if !spec.q.is_undeformed() {
        return Err(domain("Casimir check is defined for q = 1 only"));
    }
    let dim = spec.dim();
    let size = checked_dim(spec);
    let r = triple.raise.to_dense();
    let l = triple.lower.to_dense();
    let (quadratic, ladder) = match spec.branch {
        // J₀(J₀+1) + J₋J₊
        Branch::Spin => (
            diagonal((0..dim).map(|n| { let w = spec.weight(n); w * (w + 1.0) }), dim),
            &l * &r,
        ),
        // K₀(K₀−1) − K₊K₋
        Branch::DiscreteSeries => {
            let rl = &r * &l;
            (
                diagonal((0..dim).map(|n| { let w = spec.weight(n); w * (w - 1.0) }), dim),
                Mat::<Complex64>::from_fn(dim, dim, |i, j| -rl[(i, j)]),
            )
        }
    };
    let value = spec.casimir_value();
    let mut worst = 0.0f64;
    let mut scale = 1.0f64.max(value.abs());
    for c in 0..size {
        for rr in 0..size {
            let expected = if rr == c { value } else { 0.0 };
            let got = quadratic[(rr, c)] + ladder[(rr, c)];
            worst = worst.max((got - Complex64::new(expected, 0.0)).norm());
            scale = scale.max(quadratic[(rr, c)].norm());
        }
    }
    Ok(worst / scale)
}
