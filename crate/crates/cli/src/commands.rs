use std::path::Path;

use qis_core::repr::{self, AlgebraReport};
use qis_core::{
    eigen_residual, solve_by_diagonalization, solve_closed_form, solve_recurrence_with, verify,
    Branch, Complex64, Eigenpair, ExponentMode, IsParams, RecurrenceOptions, RepresentationSpec,
    StateVector, VerificationReport,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{
    build_spec, Algebra, AlgebraArgs, ExponentModeArg, GenArgs, Method, ModelArgs, SolveArgs,
    SolverArgs, SpectrumArgs, SweepArgs, VerifyArgs,
};
use crate::error::{CliError, Result};
use crate::output::{csv_bytes, json_bytes, Artifact};
use crate::Format;

/// One solved state with the problem it solves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub params: IsParams,
    pub method: Method,
    /// Set for closed-form states.
    pub exponent_mode: Option<ExponentMode>,
    pub state: StateVector,
}

/// Output of `gen`, input of `verify --input`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub algebra: Algebra,
    pub states: Vec<StateRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub params: IsParams,
    pub method: Method,
    pub report: VerificationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyFile {
    pub reports: Vec<ReportRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub eta: Complex64,
    pub eigen_residual: f64,
    pub tail: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFile {
    pub spec: RepresentationSpec,
    pub lambda: f64,
    pub entries: Vec<SpectrumEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub spec: RepresentationSpec,
    pub commutators: AlgebraReport,
    pub hermiticity: f64,
    /// `None` off `q = 1`, where the quadratic Casimir does not apply.
    pub casimir: Option<f64>,
}

/// Flat verification row, shared by `verify --format csv` and `sweep`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub lambda: f64,
    pub q: f64,
    pub index: f64,
    pub truncation: usize,
    pub eta_re: f64,
    pub eta_im: f64,
    pub eigen_residual: f64,
    pub adjoint_eigen_residual: f64,
    pub var_x1: Option<f64>,
    pub var_x2: Option<f64>,
    pub saturation_gap: Option<f64>,
    pub relative_saturation_gap: Option<f64>,
    pub squeezed_x1: Option<bool>,
    pub squeezed_x2: Option<bool>,
    pub tail: f64,
    pub converged: bool,
}

impl ReportRow {
    fn new(record: &ReportRecord, truncation: usize) -> Self {
        let (p, r) = (&record.params, &record.report);
        Self {
            lambda: p.lambda,
            q: p.spec.q.get(),
            index: p.spec.index,
            truncation,
            eta_re: p.eta.re,
            eta_im: p.eta.im,
            eigen_residual: r.eigen_residual,
            adjoint_eigen_residual: r.adjoint_eigen_residual,
            var_x1: r.var_x1,
            var_x2: r.var_x2,
            saturation_gap: r.saturation_gap,
            relative_saturation_gap: r.relative_saturation_gap,
            squeezed_x1: r.squeezed_x1,
            squeezed_x2: r.squeezed_x2,
            tail: r.tail,
            converged: r.converged,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFile {
    pub algebra: Algebra,
    pub rows: Vec<ReportRow>,
}

#[derive(Serialize)]
struct CoefficientRow {
    state: usize,
    eta_re: f64,
    eta_im: f64,
    n: usize,
    re: f64,
    im: f64,
    abs2: f64,
}

/// A fully validated eigenvalue problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub spec: RepresentationSpec,
    pub lambda: f64,
    pub eta: Complex64,
    pub tail_tol: f64,
    pub max_trunc: usize,
    pub method: Method,
    pub exponent_mode: ExponentModeArg,
}

impl Problem {
    pub fn new(spec: RepresentationSpec, lambda: f64, eta: Complex64, solver: &SolverArgs) -> Result<Self> {
        if !(solver.tail_tol.is_finite() && solver.tail_tol > 0.0) {
            return Err(CliError::Validation(format!("--tail-tol must be > 0, got {}", solver.tail_tol)));
        }
        // validates λ and η
        IsParams::new(lambda, eta, spec.clone())?;
        Ok(Self {
            spec,
            lambda,
            eta,
            tail_tol: solver.tail_tol,
            max_trunc: solver.max_trunc,
            method: solver.method,
            exponent_mode: solver.exponent_mode,
        })
    }

    fn from_args(model: &ModelArgs, solve: &SolveArgs) -> Result<Self> {
        Self::new(model.spec()?, solve.lambda, solve.eta(), &solve.solver)
    }

    fn options(&self) -> RecurrenceOptions {
        RecurrenceOptions {
            tail_tolerance: self.tail_tol,
            max_truncation: self.max_trunc,
            auto_extend: true,
        }
    }

    fn solve_at(&self, params: IsParams, pair: Option<&Eigenpair>) -> Result<StateRecord> {
        let (state, exponent_mode) = match (self.method, pair) {
            (Method::Diagonalization, Some(pair)) => (pair.state.clone(), None),
            (Method::Diagonalization, None) => unreachable!("diagonalization always supplies a pair"),
            (Method::Recurrence, _) => (solve_recurrence_with(&params, &self.options())?, None),
            (Method::ClosedForm, _) => {
                let mode = self.exponent_mode.resolve()?;
                let mut s = solve_closed_form(&params, mode)?;
                s.tail_tolerance = self.tail_tol;
                s.converged = !s.spec.is_truncated() || s.tail < self.tail_tol;
                (s, Some(mode))
            }
        };
        Ok(StateRecord { params, method: self.method, exponent_mode, state })
    }

    /// Spin: one record per admissible η. Discrete series: one record at the
    /// requested η, or at the nearest truncated eigenvalue for diagonalization.
    pub fn solve(&self) -> Result<Vec<StateRecord>> {
        match self.spec.branch {
            Branch::Spin => solve_by_diagonalization(&self.spec, self.lambda)?
                .iter()
                .map(|pair| {
                    let params = IsParams::new(self.lambda, pair.eta, self.spec.clone())?;
                    self.solve_at(params, Some(pair))
                })
                .collect(),
            Branch::DiscreteSeries if self.method == Method::Diagonalization => {
                let pairs = solve_by_diagonalization(&self.spec, self.lambda)?;
                let pair = nearest(&pairs, self.eta).expect("a nonempty spectrum");
                let params = IsParams::new(self.lambda, pair.eta, self.spec.clone())?;
                Ok(vec![self.solve_at(params, Some(pair))?])
            }
            Branch::DiscreteSeries => {
                let params = IsParams::new(self.lambda, self.eta, self.spec.clone())?;
                Ok(vec![self.solve_at(params, None)?])
            }
        }
    }
}

fn nearest(pairs: &[Eigenpair], eta: Complex64) -> Option<&Eigenpair> {
    pairs.iter().min_by(|a, b| (a.eta - eta).norm().total_cmp(&(b.eta - eta).norm()))
}

fn check_strict(strict: bool, converged: impl IntoIterator<Item = bool>) -> Result<()> {
    if strict && converged.into_iter().any(|c| !c) {
        return Err(CliError::Convergence(
            "tail above tolerance at the largest truncation; raise --max-trunc or --tail-tol".into(),
        ));
    }
    Ok(())
}

pub fn verify_records(file: &StateFile) -> Result<VerifyFile> {
    let reports = file
        .states
        .iter()
        .map(|rec| {
            Ok(ReportRecord {
                params: rec.params.clone(),
                method: rec.method,
                report: verify(&rec.state, &rec.params)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(VerifyFile { reports })
}

fn fmt_index(algebra: Algebra, index: &str) -> String {
    match algebra {
        Algebra::Su11 => format!("k{index}"),
        Algebra::Su2 => format!("j{index}"),
    }
}

fn problem_name(kind: &str, model: &ModelArgs, solve: &SolveArgs) -> Result<String> {
    let mut name = format!(
        "{kind}-{}-{}-q{}-lambda{}",
        model.algebra,
        fmt_index(model.algebra, &model.index()?.to_string()),
        model.q,
        solve.lambda
    );
    if model.algebra == Algebra::Su11 {
        name += &format!("-eta{}_{}-n{}", solve.eta_re, solve.eta_im, model.trunc);
    }
    name += &format!("-{}", solve.solver.method);
    Ok(name)
}

fn state_file(args: &GenArgs) -> Result<StateFile> {
    let problem = Problem::from_args(&args.model, &args.solve)?;
    Ok(StateFile { algebra: args.model.algebra, states: problem.solve()? })
}

/// `gen` without writing anything.
pub fn generate(args: &GenArgs) -> Result<StateFile> {
    state_file(args)
}

fn render_states(file: &StateFile, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => json_bytes(file),
        Format::Csv => {
            let rows = file.states.iter().enumerate().flat_map(|(i, rec)| {
                rec.state.table().map(move |(n, re, im, abs2)| CoefficientRow {
                    state: i,
                    eta_re: rec.params.eta.re,
                    eta_im: rec.params.eta.im,
                    n,
                    re,
                    im,
                    abs2,
                })
            });
            csv_bytes(rows)
        }
    }
}

fn render_reports(file: &VerifyFile, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => json_bytes(file),
        Format::Csv => csv_bytes(
            file.reports.iter().map(|r| ReportRow::new(r, r.params.spec.truncation)),
        ),
    }
}

pub fn gen(args: &GenArgs) -> Result<Artifact> {
    let file = state_file(args)?;
    check_strict(args.out.strict, file.states.iter().map(|r| r.state.converged))?;
    Artifact::new(problem_name("gen", &args.model, &args.solve)?, &args.out, render_states(&file, args.out.format)?)
}

pub fn read_state_file(path: &Path) -> Result<StateFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: not a state file: {e}", path.display())))
}

pub fn verify_cmd(args: &VerifyArgs) -> Result<Artifact> {
    let (file, name) = match &args.input {
        Some(path) => {
            let stem = path.file_stem().map_or("input".into(), |s| s.to_string_lossy().into_owned());
            (read_state_file(path)?, format!("verify-{stem}"))
        }
        None => {
            let gen = GenArgs { model: args.model.clone(), solve: args.solve.clone(), out: args.out.clone() };
            (state_file(&gen)?, problem_name("verify", &args.model, &args.solve)?)
        }
    };
    let reports = verify_records(&file)?;
    check_strict(args.out.strict, reports.reports.iter().map(|r| r.report.converged))?;
    Artifact::new(name, &args.out, render_reports(&reports, args.out.format)?)
}

pub fn spectrum(args: &SpectrumArgs) -> Result<Artifact> {
    let spec = args.model.spec()?;
    if !(args.tail_tol.is_finite() && args.tail_tol > 0.0) {
        return Err(CliError::Validation(format!("--tail-tol must be > 0, got {}", args.tail_tol)));
    }
    let pairs = solve_by_diagonalization(&spec, args.lambda)?;
    let mut entries = Vec::with_capacity(pairs.len());
    for pair in &pairs {
        let converged = !spec.is_truncated() || pair.state.tail < args.tail_tol;
        let within = args.eta_max.map_or(true, |m| pair.eta.norm() <= m);
        if spec.is_truncated() && !(converged && within) {
            continue;
        }
        let params = IsParams::new(args.lambda, pair.eta, spec.clone())?;
        entries.push(SpectrumEntry {
            eta: pair.eta,
            eigen_residual: eigen_residual(&pair.state, &params)?,
            tail: pair.state.tail,
            converged,
        });
    }
    let file = SpectrumFile { spec: spec.clone(), lambda: args.lambda, entries };
    let body = match args.out.format {
        Format::Json => json_bytes(&file)?,
        Format::Csv => csv_bytes(file.entries.iter().map(|e| SpectrumCsvRow {
            eta_re: e.eta.re,
            eta_im: e.eta.im,
            eigen_residual: e.eigen_residual,
            tail: e.tail,
            converged: e.converged,
        }))?,
    };
    let name = format!(
        "spectrum-{}-{}-q{}-lambda{}-n{}",
        args.model.algebra,
        fmt_index(args.model.algebra, &args.model.index()?.to_string()),
        args.model.q,
        args.lambda,
        spec.dim()
    );
    Artifact::new(name, &args.out, body)
}

#[derive(Serialize)]
struct SpectrumCsvRow {
    eta_re: f64,
    eta_im: f64,
    eigen_residual: f64,
    tail: f64,
    converged: bool,
}

/// `sweep` without writing anything. Points run in parallel; rows come back
/// in grid order (index, then λ, then q).
pub fn sweep_rows(args: &SweepArgs) -> Result<SweepFile> {
    let indices = args.index_grid()?;
    let eta = Complex64::new(args.eta_re, args.eta_im);
    let mut points = Vec::new();
    for &index in &indices.values {
        for &lambda in &args.lambda.values {
            for &q in &args.q.values {
                points.push((index, lambda, q));
            }
        }
    }
    let rows = points
        .par_iter()
        .map(|&(index, lambda, q)| {
            let spec = build_spec(args.algebra, index, q, args.trunc, args.realization)?;
            let problem = Problem::new(spec, lambda, eta, &args.solver)?;
            let records = problem.solve()?;
            // spin yields the whole admissible spectrum; keep the eigenvalue nearest η
            let record = records
                .iter()
                .min_by(|a, b| (a.params.eta - eta).norm().total_cmp(&(b.params.eta - eta).norm()))
                .expect("at least one state per point");
            let report = ReportRecord {
                params: record.params.clone(),
                method: record.method,
                report: verify(&record.state, &record.params)?,
            };
            Ok(ReportRow::new(&report, record.state.spec.truncation))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepFile { algebra: args.algebra, rows })
}

pub fn sweep(args: &SweepArgs) -> Result<Artifact> {
    let file = sweep_rows(args)?;
    check_strict(args.out.strict, file.rows.iter().map(|r| r.converged))?;
    let body = match args.out.format {
        Format::Json => json_bytes(&file)?,
        Format::Csv => csv_bytes(file.rows.iter())?,
    };
    let grid = |s: &str| s.replace(':', "_").replace(',', "+");
    let index_text = args.index_grid()?.text;
    let name = format!(
        "sweep-{}-{}-q{}-lambda{}-eta{}_{}-{}",
        args.algebra,
        fmt_index(args.algebra, &grid(&index_text)),
        grid(&args.q.text),
        grid(&args.lambda.text),
        args.eta_re,
        args.eta_im,
        args.solver.method
    );
    Artifact::new(name, &args.out, body)
}

pub fn algebra_report(model: &ModelArgs) -> Result<AlgebraFile> {
    let spec = model.spec()?;
    let triple = repr::build(&spec)?;
    let casimir = if spec.q.is_undeformed() { Some(repr::casimir_check(&triple)?) } else { None };
    Ok(AlgebraFile {
        commutators: repr::commutator_report(&triple),
        hermiticity: repr::hermiticity_report(&triple),
        casimir,
        spec,
    })
}

#[derive(Serialize)]
struct CheckRow {
    check: &'static str,
    value: Option<f64>,
}

pub fn algebra_check(args: &AlgebraArgs) -> Result<Artifact> {
    let file = algebra_report(&args.model)?;
    let body = match args.out.format {
        Format::Json => json_bytes(&file)?,
        Format::Csv => {
            let c = &file.commutators;
            csv_bytes([
                CheckRow { check: "diag_raise", value: Some(c.diag_raise) },
                CheckRow { check: "diag_lower", value: Some(c.diag_lower) },
                CheckRow { check: "raise_lower", value: Some(c.raise_lower) },
                CheckRow { check: "raise_lower_scaled", value: Some(c.raise_lower_scaled) },
                CheckRow { check: "hermiticity", value: Some(file.hermiticity) },
                CheckRow { check: "casimir", value: file.casimir },
            ])?
        }
    };
    let m = &args.model;
    let name = format!(
        "algebra-{}-{}-q{}-{}-n{}",
        m.algebra,
        fmt_index(m.algebra, &m.index()?.to_string()),
        m.q,
        match file.spec.realization {
            qis_core::Realization::Undeformed => "undeformed",
            qis_core::Realization::DysonPaper => "dyson-paper",
            qis_core::Realization::Symmetric => "symmetric",
        },
        file.spec.dim()
    );
    Artifact::new(name, &args.out, body)
}
