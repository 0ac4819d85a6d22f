//! Flags and defaults.
//!
//! | flag               | default              |
//! |--------------------|----------------------|
//! | `--algebra`        | `su11`               |
//! | `--k`              | `1`                  |
//! | `--q`              | `1`                  |
//! | `--lambda`         | `0.5`                |
//! | `--eta-re/-im`     | `0`                  |
//! | `--trunc`          | `512`                |
//! | `--max-trunc`      | `4096`               |
//! | `--tail-tol`       | `1e-12`              |
//! | `--realization`    | `symmetric`          |
//! | `--exponent-mode`  | `auto` (arbitrated)  |
//! | `--method`         | `recurrence`         |
//! | `--format`         | `json`               |
//! | `--output-dir`     | `$QIS_OUTPUT_DIR`    |
//!
//! Without `--output` or an output directory the artifact goes to stdout.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qis_core::{Complex64, ExponentMode, Realization, RepresentationSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_K: f64 = 1.0;
pub const DEFAULT_Q: f64 = 1.0;
pub const DEFAULT_LAMBDA: f64 = 0.5;
pub const DEFAULT_TRUNC: usize = 512;
pub const DEFAULT_MAX_TRUNC: usize = 4096;
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
pub const OUTPUT_DIR_ENV: &str = "QIS_OUTPUT_DIR";

#[derive(Parser, Debug, Clone)]
#[command(name = "qis", version, about = "Intelligent states of su(1,1), su(2) and their q-deformations")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Solve for intelligent states and write their coefficients
    Gen(GenArgs),
    /// Verify states from a `gen` file, or solve and verify in one step
    Verify(VerifyArgs),
    /// Admissible η (spin) or a converged slice of the truncated spectrum
    Spectrum(SpectrumArgs),
    /// One verification row per (λ, q, k/j) grid point
    Sweep(SweepArgs),
    /// Commutator, Hermiticity and Casimir residuals of the truncated generators
    AlgebraCheck(AlgebraArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algebra {
    Su11,
    Su2,
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algebra::Su11 => "su11",
            Algebra::Su2 => "su2",
        })
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealizationArg {
    Symmetric,
    DysonPaper,
    Undeformed,
}

impl From<RealizationArg> for Realization {
    fn from(r: RealizationArg) -> Self {
        match r {
            RealizationArg::Symmetric => Realization::Symmetric,
            RealizationArg::DysonPaper => Realization::DysonPaper,
            RealizationArg::Undeformed => Realization::Undeformed,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentModeArg {
    Auto,
    Paper,
    Half,
}

impl ExponentModeArg {
    pub fn resolve(self) -> Result<ExponentMode> {
        Ok(match self {
            ExponentModeArg::Auto => qis_core::selected_exponent_mode()?,
            ExponentModeArg::Paper => ExponentMode::Paper,
            ExponentModeArg::Half => ExponentMode::Half,
        })
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Recurrence,
    ClosedForm,
    Diagonalization,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Recurrence => "recurrence",
            Method::ClosedForm => "closed-form",
            Method::Diagonalization => "diagonalization",
        })
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Representation selection shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value_t = Algebra::Su11)]
    pub algebra: Algebra,
    /// Bargmann index (su11)
    #[arg(long)]
    pub k: Option<f64>,
    /// Spin (su2), a nonnegative half-integer
    #[arg(long)]
    pub j: Option<f64>,
    /// Deformation parameter q > 0
    #[arg(long, default_value_t = DEFAULT_Q)]
    pub q: f64,
    /// Basis states kept for su11
    #[arg(long, default_value_t = DEFAULT_TRUNC)]
    pub trunc: usize,
    #[arg(long, value_enum, default_value_t = RealizationArg::Symmetric)]
    pub realization: RealizationArg,
}

impl ModelArgs {
    pub fn index(&self) -> Result<f64> {
        index_for(self.algebra, self.k, self.j)
    }

    pub fn spec(&self) -> Result<RepresentationSpec> {
        build_spec(self.algebra, self.index()?, self.q, self.trunc, self.realization)
    }
}

fn index_for(algebra: Algebra, k: Option<f64>, j: Option<f64>) -> Result<f64> {
    match (algebra, k, j) {
        (Algebra::Su11, _, Some(_)) => Err(CliError::Usage("--j applies to --algebra su2".into())),
        (Algebra::Su2, Some(_), _) => Err(CliError::Usage("--k applies to --algebra su11".into())),
        (Algebra::Su11, k, None) => Ok(k.unwrap_or(DEFAULT_K)),
        (Algebra::Su2, None, Some(j)) => Ok(j),
        (Algebra::Su2, None, None) => Err(CliError::Usage("--algebra su2 requires --j".into())),
    }
}

pub(crate) fn build_spec(
    algebra: Algebra,
    index: f64,
    q: f64,
    trunc: usize,
    realization: RealizationArg,
) -> Result<RepresentationSpec> {
    let base = match algebra {
        Algebra::Su11 => RepresentationSpec::discrete_series(index, trunc)?,
        Algebra::Su2 => RepresentationSpec::spin(index)?,
    };
    Ok(base.deformed(q, realization.into())?)
}

/// Eigenvalue problem and solver selection.
#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub eta_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub eta_im: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
}

impl SolveArgs {
    pub fn eta(&self) -> Complex64 {
        Complex64::new(self.eta_re, self.eta_im)
    }
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Bound on |c_{N-1}|² for a converged state
    #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
    pub tail_tol: f64,
    /// Largest truncation reached by automatic doubling
    #[arg(long, default_value_t = DEFAULT_MAX_TRUNC)]
    pub max_trunc: usize,
    #[arg(long, value_enum, default_value_t = Method::Recurrence)]
    pub method: Method,
    #[arg(long, value_enum, default_value_t = ExponentModeArg::Auto)]
    pub exponent_mode: ExponentModeArg,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output file; overrides the output directory
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Directory for self-named output files
    #[arg(long, env = OUTPUT_DIR_ENV)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Treat a non-converged tail as an error
    #[arg(long)]
    pub strict: bool,
}

#[derive(Args, Debug, Clone)]
pub struct GenArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub solve: SolveArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// A JSON file written by `gen`; model flags are ignored when given
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub solve: SolveArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    pub lambda: f64,
    #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
    pub tail_tol: f64,
    /// Keep discrete-series eigenvalues with |η| at most this
    #[arg(long)]
    pub eta_max: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value_t = Algebra::Su11)]
    pub algebra: Algebra,
    /// Bargmann index grid
    #[arg(long)]
    pub k: Option<Grid>,
    /// Spin grid
    #[arg(long)]
    pub j: Option<Grid>,
    /// `start:stop:count`, a comma list or a single value
    #[arg(long, default_value = "1")]
    pub q: Grid,
    #[arg(long, default_value = "0.5")]
    pub lambda: Grid,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub eta_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub eta_im: f64,
    #[arg(long, default_value_t = DEFAULT_TRUNC)]
    pub trunc: usize,
    #[arg(long, value_enum, default_value_t = RealizationArg::Symmetric)]
    pub realization: RealizationArg,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

impl SweepArgs {
    pub fn index_grid(&self) -> Result<Grid> {
        match (self.algebra, &self.k, &self.j) {
            (Algebra::Su11, _, Some(_)) => Err(CliError::Usage("--j applies to --algebra su2".into())),
            (Algebra::Su2, Some(_), _) => Err(CliError::Usage("--k applies to --algebra su11".into())),
            (Algebra::Su11, k, None) => Ok(k.clone().unwrap_or_else(|| Grid::single(DEFAULT_K))),
            (Algebra::Su2, None, Some(j)) => Ok(j.clone()),
            (Algebra::Su2, None, None) => Err(CliError::Usage("--algebra su2 requires --j".into())),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct AlgebraArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Inclusive grid `start:stop:count`, a comma-separated list, or one value.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub text: String,
    pub values: Vec<f64>,
}

impl Grid {
    pub fn single(v: f64) -> Self {
        Self { text: v.to_string(), values: vec![v] }
    }
}

fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not finite: {s:?}"))
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let values = if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            let [start, stop, count] = parts[..] else {
                return Err(format!("expected start:stop:count, got {s:?}"));
            };
            let (start, stop) = (parse_number(start)?, parse_number(stop)?);
            let count: usize = count.trim().parse().map_err(|_| format!("bad count in {s:?}"))?;
            match count {
                0 => return Err(format!("count must be positive in {s:?}")),
                1 => vec![start],
                _ => {
                    let step = (stop - start) / (count - 1) as f64;
                    (0..count)
                        .map(|i| if i == count - 1 { stop } else { start + i as f64 * step })
                        .collect()
                }
            }
        } else {
            s.split(',').map(parse_number).collect::<std::result::Result<_, _>>()?
        };
        Ok(Grid { text: s.to_string(), values })
    }
}
