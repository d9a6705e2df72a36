//! Runs scenarios through the available solver paths and formats the
//! results: CSV time series for single runs, JSON tables for comparisons.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::ComplexMatrix;
use crate::cavity::fock_solution;
use crate::effective::EffectiveHamiltonian;
use crate::error::Error;
use crate::model::{rk4_evolve, rk4_min_steps, MasterEquation};
use crate::qubit::evolve_qubit;
use crate::scenario::{Method, ModelSpec, Observable, Scenario, ScenarioError};
use crate::tolerance::Tolerances;

/// Default total RK4 step count over `[0, stop]` when the scenario gives none.
pub const DEFAULT_RK4_STEPS: usize = 4000;

/// Default tolerance of `compare`.
pub const DEFAULT_COMPARE_TOL: f64 = 1e-8;

pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const INVALID: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    pub const COMPARISON: i32 = 4;
}

#[derive(Debug)]
pub enum HarnessError {
    Scenario(ScenarioError),
    Usage(String),
    Io(String),
    Solver { method: Method, source: Error },
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Scenario(_) | Self::Usage(_) | Self::Io(_) => exit::INVALID,
            Self::Solver { .. } => exit::NUMERICAL,
        }
    }
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Scenario(e) => write!(f, "{e}"),
            Self::Usage(msg) => write!(f, "usage error: {msg}"),
            Self::Io(msg) => write!(f, "i/o error: {msg}"),
            Self::Solver { method, source } => write!(f, "{} solver failed: {source}", method.name()),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<ScenarioError> for HarnessError {
    fn from(e: ScenarioError) -> Self {
        Self::Scenario(e)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub method: &'static str,
    pub model: &'static str,
    pub points: usize,
    pub wall_time_s: f64,
    pub trace_preserving: bool,
    pub max_trace_deviation: f64,
    /// Grid indices whose trace left `1 ± trace_tol` in a trace-preserving run.
    pub trace_flagged_rows: Vec<usize>,
    pub truncation_warning: bool,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub columns: Vec<String>,
    pub times: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: RunMetadata,
}

impl RunReport {
    /// CSV with a `t` column followed by the observable columns; every value
    /// printed with 15 significant digits.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["t".to_string()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header).expect("in-memory write");
        for (t, row) in self.times.iter().zip(&self.rows) {
            let mut rec = vec![format_number(*t)];
            rec.extend(row.iter().map(|&x| format_number(x)));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("ascii output")
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

pub fn format_number(x: f64) -> String {
    // Avoid "-0" vs "0" differences between solver paths.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.14e}")
}

/// Evolved states on the scenario grid for the given method.
///
/// Returns the states and whether the initial state sits too close to a
/// Fock truncation.
pub fn evolve_states(scenario: &Scenario, method: Method) -> Result<(Vec<ComplexMatrix>, bool), HarnessError> {
    if !scenario.model.supports(method) {
        return Err(HarnessError::Usage(format!(
            "method `{}` is not available for {} models",
            method.name(),
            scenario.model.kind()
        )));
    }
    let solver = |source: Error| HarnessError::Solver { method, source };
    let times = scenario.times.times();
    let rho0 = &scenario.initial_state;
    let mut truncation_warning = false;
    let states = match (method, &scenario.model) {
        (Method::Analytic, ModelSpec::Qubit(p)) => times
            .par_iter()
            .map(|&t| evolve_qubit(rho0, p, t))
            .collect::<Result<Vec<_>, _>>()
            .map_err(solver)?,
        (Method::Analytic, ModelSpec::Cavity(p)) => {
            let out = times
                .par_iter()
                .map(|&t| fock_solution(rho0, p, t))
                .collect::<Result<Vec<_>, _>>()
                .map_err(solver)?;
            truncation_warning = out.iter().any(|e| e.truncation_warning);
            out.into_iter().map(|e| e.rho).collect()
        }
        (Method::Analytic, ModelSpec::Generic(_)) => unreachable!("rejected above"),
        (Method::Expm, spec) => {
            let model = spec.master_equation();
            let h = EffectiveHamiltonian::build(&model).map_err(solver)?;
            times
                .par_iter()
                .map(|&t| h.propagator(t)?.apply(rho0))
                .collect::<Result<Vec<_>, _>>()
                .map_err(solver)?
        }
        (Method::Rk4, spec) => {
            let model = spec.master_equation();
            rk4_series(&model, rho0, &times, scenario.rk4_steps).map_err(solver)?
        }
    };
    if let ModelSpec::Cavity(p) = &scenario.model {
        truncation_warning |= crate::cavity::support_top(rho0) > p.reliable_max();
    }
    Ok((states, truncation_warning))
}

/// Sequential RK4 through the grid, `total_steps` spread evenly over `[0, stop]`.
fn rk4_series(
    model: &MasterEquation,
    rho0: &ComplexMatrix,
    times: &[f64],
    total_steps: Option<usize>,
) -> Result<Vec<ComplexMatrix>, Error> {
    let stop = *times.last().expect("grid has points");
    let total = total_steps.unwrap_or_else(|| DEFAULT_RK4_STEPS.max(rk4_min_steps(model, stop, 0.5)));
    let per_unit = total as f64 / stop;
    let mut out = Vec::with_capacity(times.len());
    let mut rho = rho0.clone();
    let mut now = 0.0;
    for &t in times {
        let span = t - now;
        if span > 0.0 {
            let steps = ((span * per_unit - 1e-9).ceil() as usize)
                .max(rk4_min_steps(model, span, 1.0))
                .max(1);
            rho = rk4_evolve(model, &rho, span, steps)?;
        }
        now = t;
        out.push(rho.clone());
    }
    Ok(out)
}

fn observable_values(obs: &Observable, rho: &ComplexMatrix) -> Result<Vec<f64>, Error> {
    Ok(match *obs {
        Observable::Population(n) => vec![rho.get(n, n).re],
        Observable::Coherence(m, n) => {
            let z = rho.get(m, n);
            vec![z.re, z.im]
        }
        Observable::Trace => vec![rho.trace().re],
        Observable::Purity => vec![rho.dot(rho).trace().re],
        Observable::MinEigenvalue => vec![rho.min_eigenvalue()?],
    })
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub trace_tol: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            trace_tol: Tolerances::DEFAULT.trace_flag,
        }
    }
}

pub fn run(scenario: &Scenario) -> Result<RunReport, HarnessError> {
    run_with(scenario, scenario.method, RunOptions::default())
}

/// Runs the scenario with an explicit method, overriding `scenario.method`.
pub fn run_with(scenario: &Scenario, method: Method, opts: RunOptions) -> Result<RunReport, HarnessError> {
    let started = Instant::now();
    let (states, truncation_warning) = evolve_states(scenario, method)?;
    let solver = |source: Error| HarnessError::Solver { method, source };

    let columns: Vec<String> = scenario.observables.iter().flat_map(|o| o.columns()).collect();
    let rows = states
        .par_iter()
        .map(|rho| -> Result<Vec<f64>, Error> {
            let mut row = Vec::with_capacity(columns.len());
            for obs in &scenario.observables {
                row.extend(observable_values(obs, rho)?);
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::NumericalRange("non-finite observable value".into()));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(solver)?;

    let trace_preserving = scenario.model.master_equation().is_trace_preserving();
    let deviations: Vec<f64> = states.iter().map(|r| (r.trace().re - 1.0).abs()).collect();
    let initial_trace = scenario.initial_state.trace().re;
    let normalized = (initial_trace - 1.0).abs() <= opts.trace_tol;
    let trace_flagged_rows = if trace_preserving && normalized {
        deviations
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > opts.trace_tol)
            .map(|(k, _)| k)
            .collect()
    } else {
        Vec::new()
    };

    let times = scenario.times.times();
    Ok(RunReport {
        columns,
        metadata: RunMetadata {
            method: method.name(),
            model: scenario.model.kind(),
            points: times.len(),
            wall_time_s: started.elapsed().as_secs_f64(),
            trace_preserving,
            max_trace_deviation: deviations.iter().copied().fold(0.0, f64::max),
            trace_flagged_rows,
            truncation_warning,
        },
        times,
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PairDeviation {
    pub methods: [&'static str; 2],
    pub max_abs_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ColumnComparison {
    pub observable: String,
    pub max_abs_deviation: f64,
    pub pairs: Vec<PairDeviation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub methods: Vec<&'static str>,
    pub tol: f64,
    pub points: usize,
    pub truncation_warning: bool,
    /// Rows left out of the pass/fail decision because of truncation flags.
    pub excluded_rows: usize,
    pub columns: Vec<ColumnComparison>,
    pub max_abs_deviation: f64,
    pub pass: bool,
}

impl ComparisonReport {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            exit::SUCCESS
        } else {
            exit::COMPARISON
        }
    }
}

/// Runs every method on the same scenario and tabulates the pairwise
/// maximum absolute deviation per observable column.
pub fn compare(scenario: &Scenario, methods: &[Method], tol: f64) -> Result<ComparisonReport, HarnessError> {
    let distinct: BTreeSet<&str> = methods.iter().map(|m| m.name()).collect();
    if methods.len() < 2 || distinct.len() != methods.len() {
        return Err(HarnessError::Usage("compare needs at least two distinct methods".into()));
    }
    if !(tol > 0.0) {
        return Err(HarnessError::Usage(format!("tolerance must be positive, got {tol}")));
    }
    for &m in methods {
        if !scenario.model.supports(m) {
            return Err(HarnessError::Usage(format!(
                "method `{}` is not available for {} models",
                m.name(),
                scenario.model.kind()
            )));
        }
    }
    let reports = methods
        .iter()
        .map(|&m| run_with(scenario, m, RunOptions::default()))
        .collect::<Result<Vec<_>, _>>()?;

    let truncation_warning = reports.iter().any(|r| r.metadata.truncation_warning);
    let points = reports[0].rows.len();
    let included: Vec<usize> = if truncation_warning { Vec::new() } else { (0..points).collect() };

    let mut columns = Vec::new();
    let mut overall: f64 = 0.0;
    for (c, name) in reports[0].columns.iter().enumerate() {
        let mut pairs = Vec::new();
        let mut worst: f64 = 0.0;
        for i in 0..reports.len() {
            for j in i + 1..reports.len() {
                let dev = included
                    .iter()
                    .map(|&r| (reports[i].rows[r][c] - reports[j].rows[r][c]).abs())
                    .fold(0.0, f64::max);
                worst = worst.max(dev);
                pairs.push(PairDeviation {
                    methods: [methods[i].name(), methods[j].name()],
                    max_abs_deviation: dev,
                });
            }
        }
        overall = overall.max(worst);
        columns.push(ColumnComparison {
            observable: name.clone(),
            max_abs_deviation: worst,
            pairs,
        });
    }
    Ok(ComparisonReport {
        methods: methods.iter().map(|m| m.name()).collect(),
        tol,
        points,
        truncation_warning,
        excluded_rows: points - included.len(),
        columns,
        max_abs_deviation: overall,
        pass: overall <= tol,
    })
}

/// Parses a comma-separated method list such as `expm,rk4,analytic`.
pub fn parse_methods(list: &str) -> Result<Vec<Method>, HarnessError> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| Method::parse(s).ok_or_else(|| HarnessError::Usage(format!("unknown method `{}`", s.trim()))))
        .collect()
}
