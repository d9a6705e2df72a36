//! JSON scenario files: parsing, schema checks and semantic validation.

use std::fmt;

use serde::Deserialize;

use crate::algebra::{ComplexMatrix, C64};
use crate::cavity::{coherent_state, thermal_state, CavityParams};
use crate::model::{MasterEquation, StandardForm};
use crate::operators::{projector, EXCITED, GROUND};
use crate::qubit::{bose_occupation, QubitParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioErrorKind {
    MalformedJson,
    Schema,
    DimensionMismatch,
    UnknownMethod,
    UnknownObservable,
    InvalidValue,
}

impl ScenarioErrorKind {
    fn label(self) -> &'static str {
        match self {
            Self::MalformedJson => "malformed JSON",
            Self::Schema => "schema violation",
            Self::DimensionMismatch => "dimension mismatch",
            Self::UnknownMethod => "unknown method",
            Self::UnknownObservable => "unknown observable",
            Self::InvalidValue => "invalid value",
        }
    }
}

/// A scenario diagnostic naming the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioError {
    pub kind: ScenarioErrorKind,
    pub path: String,
    pub message: String,
}

impl ScenarioError {
    fn new(kind: ScenarioErrorKind, path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            kind,
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}: {}", self.kind.label(), self.message)
        } else {
            write!(f, "{} at `{}`: {}", self.kind.label(), self.path, self.message)
        }
    }
}

impl std::error::Error for ScenarioError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Expm,
    Rk4,
    Analytic,
}

impl Method {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "expm" => Some(Self::Expm),
            "rk4" => Some(Self::Rk4),
            "analytic" => Some(Self::Analytic),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Expm => "expm",
            Self::Rk4 => "rk4",
            Self::Analytic => "analytic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    Population(usize),
    Coherence(usize, usize),
    Trace,
    Purity,
    MinEigenvalue,
}

impl Observable {
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        match s {
            "trace" => return Some(Self::Trace),
            "purity" => return Some(Self::Purity),
            "min_eigenvalue" => return Some(Self::MinEigenvalue),
            _ => {}
        }
        if let Some(n) = s.strip_prefix("population:") {
            return n.trim().parse().ok().map(Self::Population);
        }
        let (m, n) = s.strip_prefix("coherence:")?.split_once(',')?;
        Some(Self::Coherence(m.trim().parse().ok()?, n.trim().parse().ok()?))
    }

    /// CSV column labels; coherences take a real and an imaginary column.
    pub fn columns(&self) -> Vec<String> {
        match *self {
            Self::Population(n) => vec![format!("population:{n}")],
            Self::Coherence(m, n) => vec![format!("coherence:{m},{n}:re"), format!("coherence:{m},{n}:im")],
            Self::Trace => vec!["trace".into()],
            Self::Purity => vec!["purity".into()],
            Self::MinEigenvalue => vec!["min_eigenvalue".into()],
        }
    }

    fn max_index(&self) -> Option<usize> {
        match *self {
            Self::Population(n) => Some(n),
            Self::Coherence(m, n) => Some(m.max(n)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum ModelSpec {
    Generic(MasterEquation),
    Qubit(QubitParams),
    Cavity(CavityParams),
}

impl ModelSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Generic(_) => "generic",
            Self::Qubit(_) => "qubit",
            Self::Cavity(_) => "cavity",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Generic(m) => m.dim(),
            Self::Qubit(_) => 2,
            Self::Cavity(p) => p.dim(),
        }
    }

    pub fn master_equation(&self) -> MasterEquation {
        match self {
            Self::Generic(m) => m.clone(),
            Self::Qubit(p) => p.model(),
            Self::Cavity(p) => p.model(),
        }
    }

    pub fn supports(&self, method: Method) -> bool {
        !(matches!(self, Self::Generic(_)) && method == Method::Analytic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    self.stop
                } else {
                    self.start + k as f64 * step
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub model: ModelSpec,
    pub initial_state: ComplexMatrix,
    pub times: TimeGrid,
    pub method: Method,
    pub observables: Vec<Observable>,
    /// Total RK4 steps over `[0, stop]`; chosen automatically when absent.
    pub rk4_steps: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    model: RawModel,
    initial_state: RawState,
    times: RawTimes,
    method: String,
    observables: Vec<RawObservable>,
    #[serde(default)]
    rk4_steps: Option<usize>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawModel {
    Generic {
        dim: usize,
        hamiltonian: ComplexMatrix,
        #[serde(default)]
        channels: Vec<RawChannel>,
    },
    Qubit {
        rabi: f64,
        gamma: f64,
        #[serde(default)]
        nbar: Option<f64>,
        #[serde(default)]
        omega: Option<f64>,
        #[serde(default)]
        temperature: Option<f64>,
    },
    Cavity {
        omega_f: f64,
        kappa: f64,
        n_max: usize,
    },
}

#[derive(Deserialize)]
struct RawChannel {
    operator: ComplexMatrix,
    rate: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawState {
    Named(String),
    Matrix(ComplexMatrix),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTimes {
    start: f64,
    stop: f64,
    points: usize,
    #[serde(default)]
    spacing: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawObservable {
    Name(String),
    Tagged { kind: String },
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    use ScenarioErrorKind::*;

    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| ScenarioError::new(MalformedJson, "", e.to_string()))?;
    let raw: RawScenario = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        ScenarioError::new(Schema, if path == "." { String::new() } else { path }, e.into_inner().to_string())
    })?;

    let model = validate_model(raw.model)?;
    let dim = model.dim();

    let method = Method::parse(&raw.method)
        .ok_or_else(|| ScenarioError::new(UnknownMethod, "method", format!("`{}`", raw.method)))?;
    if !model.supports(method) {
        return Err(ScenarioError::new(
            InvalidValue,
            "method",
            format!("`{}` is not available for {} models", method.name(), model.kind()),
        ));
    }

    let times = validate_times(&raw.times)?;

    let initial_state = match raw.initial_state {
        RawState::Named(name) => named_state(&name, &model)?,
        RawState::Matrix(m) => {
            if m.rows() != dim || m.cols() != dim {
                return Err(ScenarioError::new(
                    DimensionMismatch,
                    "initial_state",
                    format!("expected {dim}x{dim}, got {}x{}", m.rows(), m.cols()),
                ));
            }
            m
        }
    };

    let mut observables = Vec::with_capacity(raw.observables.len());
    for (k, obs) in raw.observables.iter().enumerate() {
        let text = match obs {
            RawObservable::Name(s) => s,
            RawObservable::Tagged { kind } => kind,
        };
        let path = format!("observables[{k}]");
        let parsed = Observable::parse(text)
            .ok_or_else(|| ScenarioError::new(UnknownObservable, path.clone(), format!("`{text}`")))?;
        if parsed.max_index().is_some_and(|i| i >= dim) {
            return Err(ScenarioError::new(
                DimensionMismatch,
                path,
                format!("index out of range for dimension {dim}"),
            ));
        }
        observables.push(parsed);
    }
    if observables.is_empty() {
        return Err(ScenarioError::new(InvalidValue, "observables", "at least one observable is required"));
    }
    if raw.rk4_steps == Some(0) {
        return Err(ScenarioError::new(InvalidValue, "rk4_steps", "must be positive"));
    }

    Ok(Scenario {
        model,
        initial_state,
        times,
        method,
        observables,
        rk4_steps: raw.rk4_steps,
    })
}

fn validate_model(raw: RawModel) -> Result<ModelSpec, ScenarioError> {
    use ScenarioErrorKind::*;
    let invalid = |path: &str, msg: String| ScenarioError::new(InvalidValue, format!("model.{path}"), msg);
    let finite = |path: &str, x: f64| {
        if x.is_finite() { Ok(x) } else { Err(invalid(path, format!("{x} is not finite"))) }
    };
    let nonneg = |path: &str, x: f64| {
        if x >= 0.0 && x.is_finite() { Ok(x) } else { Err(invalid(path, format!("must be >= 0, got {x}"))) }
    };

    match raw {
        RawModel::Generic { dim, hamiltonian, channels } => {
            if dim == 0 {
                return Err(invalid("dim", "must be positive".into()));
            }
            let check_dim = |path: String, m: &ComplexMatrix| {
                if m.rows() != dim || m.cols() != dim {
                    Err(ScenarioError::new(
                        DimensionMismatch,
                        path,
                        format!("expected {dim}x{dim}, got {}x{}", m.rows(), m.cols()),
                    ))
                } else {
                    Ok(())
                }
            };
            check_dim("model.hamiltonian".into(), &hamiltonian)?;
            let mut sf = StandardForm::new(hamiltonian);
            for (k, ch) in channels.into_iter().enumerate() {
                check_dim(format!("model.channels[{k}].operator"), &ch.operator)?;
                nonneg(&format!("channels[{k}].rate"), ch.rate)?;
                sf = sf.lowering(ch.operator, ch.rate);
            }
            let model = MasterEquation::from_standard_form(&sf)
                .map_err(|e| invalid("hamiltonian", e.to_string()))?;
            Ok(ModelSpec::Generic(model))
        }
        RawModel::Qubit { rabi, gamma, nbar, omega, temperature } => {
            finite("rabi", rabi)?;
            nonneg("gamma", gamma)?;
            let nbar = match (nbar, omega, temperature) {
                (Some(n), None, None) => nonneg("nbar", n)?,
                (None, Some(w), Some(t)) => {
                    bose_occupation(w, t).map_err(|e| invalid("temperature", e.to_string()))?
                }
                (None, None, None) => 0.0,
                _ => {
                    return Err(ScenarioError::new(
                        Schema,
                        "model",
                        "give either `nbar` or both `omega` and `temperature`",
                    ))
                }
            };
            QubitParams::new(rabi, gamma, nbar)
                .map(ModelSpec::Qubit)
                .map_err(|e| invalid("", e.to_string()))
        }
        RawModel::Cavity { omega_f, kappa, n_max } => {
            finite("omega_f", omega_f)?;
            nonneg("kappa", kappa)?;
            if n_max < 1 {
                return Err(invalid("n_max", "must be at least 1".into()));
            }
            CavityParams::new(omega_f, kappa, n_max)
                .map(ModelSpec::Cavity)
                .map_err(|e| invalid("", e.to_string()))
        }
    }
}

fn validate_times(raw: &RawTimes) -> Result<TimeGrid, ScenarioError> {
    use ScenarioErrorKind::*;
    if let Some(s) = &raw.spacing {
        if s != "linear" {
            return Err(ScenarioError::new(InvalidValue, "times.spacing", format!("only `linear` is supported, got `{s}`")));
        }
    }
    if !(raw.start >= 0.0) || !raw.start.is_finite() {
        return Err(ScenarioError::new(InvalidValue, "times.start", "must be finite and >= 0"));
    }
    if !(raw.stop > raw.start) || !raw.stop.is_finite() {
        return Err(ScenarioError::new(InvalidValue, "times.stop", "must be finite and greater than start"));
    }
    if raw.points < 2 {
        return Err(ScenarioError::new(InvalidValue, "times.points", "need at least 2 points"));
    }
    Ok(TimeGrid {
        start: raw.start,
        stop: raw.stop,
        points: raw.points,
    })
}

fn named_state(name: &str, model: &ModelSpec) -> Result<ComplexMatrix, ScenarioError> {
    let bad = |msg: String| ScenarioError::new(ScenarioErrorKind::InvalidValue, "initial_state", msg);
    let dim = model.dim();
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h.trim(), Some(a.trim())),
        None => (name.trim(), None),
    };
    let parse_f64 = |s: &str| -> Result<f64, ScenarioError> {
        s.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| bad(format!("bad number `{s}` in `{name}`")))
    };
    match (head, arg, model) {
        ("excited", None, ModelSpec::Qubit(_)) => Ok(projector(2, EXCITED)),
        ("ground", None, ModelSpec::Qubit(_)) => Ok(projector(2, GROUND)),
        ("ground", None, ModelSpec::Cavity(p)) => Ok(projector(p.dim(), 0)),
        ("plus", None, ModelSpec::Qubit(_)) => Ok(ComplexMatrix::from_fn(2, 2, |_| C64::new(0.5, 0.0))),
        ("fock", Some(n), _) => {
            let n: usize = n.parse().map_err(|_| bad(format!("bad level in `{name}`")))?;
            if n >= dim {
                return Err(bad(format!("level {n} out of range for dimension {dim}")));
            }
            Ok(projector(dim, n))
        }
        ("coherent", Some(arg), ModelSpec::Cavity(p)) => {
            let (re, im) = arg.split_once(',').ok_or_else(|| bad(format!("expected `coherent:re,im`, got `{name}`")))?;
            Ok(coherent_state(C64::new(parse_f64(re)?, parse_f64(im)?), p.n_max))
        }
        ("thermal", Some(beta), ModelSpec::Cavity(p)) => {
            thermal_state(parse_f64(beta)?, p.n_max).map_err(|e| bad(e.to_string()))
        }
        _ => Err(bad(format!("`{name}` is not a valid state for a {} model", model.kind()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"model":{"kind":"qubit","rabi":5,"gamma":1,"nbar":0},
        "initial_state":"excited", "times":{"start":0,"stop":5,"points":51},
        "method":"analytic", "observables":["population:0","trace"]}"#;

    #[test]
    fn minimal_qubit() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert!(matches!(s.model, ModelSpec::Qubit(p) if p.rabi == 5.0 && p.gamma == 1.0));
        assert_eq!(s.method, Method::Analytic);
        assert_eq!(s.observables, vec![Observable::Population(0), Observable::Trace]);
        let t = s.times.times();
        assert_eq!(t.len(), 51);
        assert_eq!(t[50], 5.0);
        assert!((t[10] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn negative_rate_names_path() {
        let text = r#"{"model":{"kind":"generic","dim":2,
            "hamiltonian":[[[1,0],[0,0]],[[0,0],[-1,0]]],
            "channels":[{"operator":[[[0,0],[0,0]],[[1,0],[0,0]]],"rate":-1}]},
            "initial_state":"fock:0","times":{"start":0,"stop":1,"points":3},
            "method":"expm","observables":["trace"]}"#;
        let err = parse_scenario(text).unwrap_err();
        assert_eq!(err.kind, ScenarioErrorKind::InvalidValue);
        assert!(err.path.contains("channels[0].rate"), "{err}");
    }

    #[test]
    fn matrix_literal_channel() {
        let text = r#"{"model":{"kind":"generic","dim":2,
            "hamiltonian":[[[0.5,0],[0,0]],[[0,0],[-0.5,0]]],
            "channels":[{"operator":[[[0,0],[0,0]],[[1,0],[0,0]]],"rate":0.3}]},
            "initial_state":[[[1,0],[0,0]],[[0,0],[0,0]]],"times":{"start":0,"stop":1,"points":3},
            "method":"rk4","observables":[{"kind":"population:1"}]}"#;
        let s = parse_scenario(text).unwrap();
        let ModelSpec::Generic(m) = &s.model else { panic!() };
        assert_eq!(m.channels()[0].operator(), &crate::operators::sigma_minus());
        assert_eq!(s.observables, vec![Observable::Population(1)]);
    }

    #[test]
    fn error_kinds() {
        use ScenarioErrorKind::*;
        assert_eq!(parse_scenario("{not json").unwrap_err().kind, MalformedJson);
        assert_eq!(parse_scenario(&MINIMAL.replace("\"analytic\"", "\"euler\"")).unwrap_err().kind, UnknownMethod);
        assert_eq!(parse_scenario(&MINIMAL.replace("\"trace\"", "\"entropy\"")).unwrap_err().kind, UnknownObservable);
        assert_eq!(parse_scenario(&MINIMAL.replace("population:0", "population:2")).unwrap_err().kind, DimensionMismatch);
        let err = parse_scenario(&MINIMAL.replace("\"points\":51", "\"points\":\"x\"")).unwrap_err();
        assert_eq!(err.kind, Schema);
        assert_eq!(err.path, "times.points");
        assert_eq!(parse_scenario(&MINIMAL.replace("\"stop\":5", "\"stop\":0")).unwrap_err().path, "times.stop");
        let err = parse_scenario(&MINIMAL.replace("\"excited\"", "[[[1,0]]]")).unwrap_err();
        assert_eq!(err.kind, DimensionMismatch);
        assert_eq!(parse_scenario(&MINIMAL.replace("\"excited\"", "\"thermal:1\"")).unwrap_err().kind, InvalidValue);
    }

    #[test]
    fn generic_rejects_analytic() {
        let text = r#"{"model":{"kind":"generic","dim":1,"hamiltonian":[[[1,0]]]},
            "initial_state":"fock:0","times":{"start":0,"stop":1,"points":2},
            "method":"analytic","observables":["trace"]}"#;
        assert_eq!(parse_scenario(text).unwrap_err().path, "method");
    }

    #[test]
    fn temperature_sets_nbar() {
        let text = MINIMAL.replace("\"nbar\":0", "\"omega\":0.6931471805599453,\"temperature\":1");
        let s = parse_scenario(&text).unwrap();
        let ModelSpec::Qubit(p) = s.model else { panic!() };
        assert!((p.nbar - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cavity_named_states() {
        let base = r#"{"model":{"kind":"cavity","omega_f":2,"kappa":1,"n_max":10},
            "initial_state":"STATE","times":{"start":0,"stop":1,"points":2},
            "method":"analytic","observables":["population:1"]}"#;
        for name in ["fock:3", "coherent:0.5,-0.2", "thermal:1.5", "ground"] {
            let s = parse_scenario(&base.replace("STATE", name)).unwrap();
            assert_eq!(s.initial_state.rows(), 11);
            assert!((s.initial_state.trace().re - 1.0).abs() < 1e-12, "{name}");
        }
        assert!(parse_scenario(&base.replace("STATE", "fock:11")).is_err());
        assert!(parse_scenario(&base.replace("STATE", "excited")).is_err());
        assert!(parse_scenario(&base.replace("STATE", "coherent:x,1")).is_err());
    }
}
