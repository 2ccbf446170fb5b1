//! Scenario files: JSON in, validated [`ScenarioConfig`] out.
//!
//! Structural problems (wrong types, unknown keys) are reported with the
//! JSON path supplied by `serde_path_to_error`; semantic checks name the
//! offending path explicitly.

use std::fmt;
use std::path::Path;

use pseudohyp_core::curves::CurveKind;
use pseudohyp_core::em::{FourPotentialSpec, PotentialKind};
use pseudohyp_core::forms::{CatalogForm, CovectorFieldSpec, MetricSpec, MAX_DIM, MIN_DIM};
use pseudohyp_core::grid::GridSpec;
use pseudohyp_core::poly::{Monomial, Polynomial};
use serde::Deserialize;

pub const DEFAULT_ZERO_FORM_TOL: f64 = 1e-9;
pub const DEFAULT_EIGEN_ZERO_TOL: f64 = 1e-8;
pub const DEFAULT_DRIFT_TOL: f64 = 1e-7;
pub const DEFAULT_NORMALITY_TOL: f64 = 1e-6;

/// A configuration problem tied to a JSON path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

type Result<T> = std::result::Result<T, ConfigError>;

// ---- raw JSON shape ----

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    space: RawSpace,
    form: RawForm,
    task: Task,
    grid: Option<RawGrid>,
    integrate: Option<RawIntegrate>,
    #[serde(default)]
    tolerances: RawTolerances,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    dimension: usize,
    metric: RawMetric,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawMetric {
    Preset(String),
    Diagonal { diag: Vec<f64> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    coeff: f64,
    exponents: Vec<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawForm {
    catalog: Option<String>,
    k: Option<usize>,
    lambda: Option<Vec<RawTerm>>,
    phi: Option<Vec<RawTerm>>,
    polynomial: Option<Vec<Vec<RawTerm>>>,
    em: Option<RawEm>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEm {
    kind: String,
    #[serde(rename = "B")]
    b: Option<f64>,
    #[serde(rename = "E")]
    e: Option<f64>,
    phi: Option<Vec<RawTerm>>,
    components: Option<Vec<Vec<RawTerm>>>,
    q: Option<f64>,
    m: Option<f64>,
    c: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    center: Vec<f64>,
    half_width: f64,
    samples_per_axis: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegrate {
    kind: IntegrateKind,
    x0: Vec<f64>,
    v0: Vec<f64>,
    lambda0: Option<f64>,
    step: f64,
    steps: usize,
    #[serde(default)]
    velocity_projection: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    zero_form: Option<f64>,
    eigen_zero: Option<f64>,
    drift: Option<f64>,
    normality: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    trajectory_csv: Option<String>,
    report_json: Option<String>,
}

// ---- validated config ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Classify,
    Curvature,
    Integrate,
    Verify,
}

impl Task {
    pub fn as_str(&self) -> &'static str {
        match self {
            Task::Classify => "classify",
            Task::Curvature => "curvature",
            Task::Integrate => "integrate",
            Task::Verify => "verify",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "classify" => Some(Task::Classify),
            "curvature" => Some(Task::Curvature),
            "integrate" => Some(Task::Integrate),
            "verify" => Some(Task::Verify),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegrateKind {
    NormalCurve,
    Geodesic,
    Lorentz,
    EmGeodesic,
}

impl IntegrateKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            IntegrateKind::NormalCurve => "normal_curve",
            IntegrateKind::Geodesic => "geodesic",
            IntegrateKind::Lorentz => "lorentz",
            IntegrateKind::EmGeodesic => "em_geodesic",
        }
    }

    /// The Pfaffian kinds carry a constraint `N(v) = 0`.
    pub fn is_pfaffian(&self) -> bool {
        !matches!(self, IntegrateKind::Lorentz)
    }

    pub fn curve_kind(&self) -> Option<CurveKind> {
        match self {
            IntegrateKind::NormalCurve => Some(CurveKind::NormalCurve),
            IntegrateKind::Geodesic => Some(CurveKind::Geodesic),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FormConfig {
    Field(CovectorFieldSpec),
    Em(FourPotentialSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrateConfig {
    pub kind: IntegrateKind,
    pub x0: Vec<f64>,
    pub v0: Vec<f64>,
    pub lambda0: f64,
    pub step: f64,
    pub steps: usize,
    pub velocity_projection: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub zero_form: f64,
    pub eigen_zero: f64,
    pub drift: f64,
    pub normality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            zero_form: DEFAULT_ZERO_FORM_TOL,
            eigen_zero: DEFAULT_EIGEN_ZERO_TOL,
            drift: DEFAULT_DRIFT_TOL,
            normality: DEFAULT_NORMALITY_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub trajectory_csv: String,
    pub report_json: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub dimension: usize,
    pub metric: MetricSpec,
    pub form: FormConfig,
    pub task: Task,
    pub grid: Option<GridSpec>,
    pub integrate: Option<IntegrateConfig>,
    pub tolerances: Tolerances,
    pub output: OutputConfig,
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    parse_config_with_task(text, None)
}

/// Parses and validates, with `task` overriding the file's task.
pub fn parse_config_with_task(text: &str, task: Option<Task>) -> Result<ScenarioConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { String::new() } else { path };
        ConfigError::new(path, e.inner().to_string())
    })?;
    validate(raw, task)
}

fn validate(raw: RawConfig, task_override: Option<Task>) -> Result<ScenarioConfig> {
    let task = task_override.unwrap_or(raw.task);
    let dim = raw.space.dimension;
    if !(MIN_DIM..=MAX_DIM).contains(&dim) {
        return Err(ConfigError::new(
            "space.dimension",
            format!("dimension must be between {MIN_DIM} and {MAX_DIM}, got {dim}"),
        ));
    }
    let metric = match &raw.space.metric {
        RawMetric::Preset(name) => MetricSpec::preset(name, dim),
        RawMetric::Diagonal { diag } => {
            if diag.len() != dim {
                return Err(ConfigError::new(
                    "space.metric.diag",
                    format!("expected {dim} entries, got {}", diag.len()),
                ));
            }
            MetricSpec::diagonal(diag.clone())
        }
    }
    .map_err(|e| ConfigError::new("space.metric", core_message(&e)))?;

    let form = form_config(&raw.form, dim)?;
    if let FormConfig::Em(_) = form {
        if dim != 4 || metric != MetricSpec::minkowski() {
            return Err(ConfigError::new("form.em", "electromagnetic forms require dimension 4 and metric \"minkowski\""));
        }
    }

    let tolerances = tolerances(&raw.tolerances)?;

    let grid = match raw.grid {
        Some(g) => {
            if g.center.len() != dim {
                return Err(ConfigError::new("grid.center", format!("expected {dim} entries, got {}", g.center.len())));
            }
            let spec = GridSpec::new(g.center, g.half_width, g.samples_per_axis)
                .map_err(|e| ConfigError::new("grid", core_message(&e)))?;
            Some(spec)
        }
        None => None,
    };
    if matches!(task, Task::Classify | Task::Curvature) && grid.is_none() {
        return Err(ConfigError::new("grid", format!("task \"{}\" requires a grid block", task.as_str())));
    }

    let integrate = match raw.integrate {
        Some(i) => Some(integrate_config(i, dim, &form)?),
        None => None,
    };
    if task == Task::Integrate && integrate.is_none() {
        return Err(ConfigError::new("integrate", "task \"integrate\" requires an integrate block"));
    }

    let output = OutputConfig {
        trajectory_csv: raw.output.trajectory_csv.unwrap_or_else(|| "trajectory.csv".into()),
        report_json: raw.output.report_json.unwrap_or_else(|| format!("{}_report.json", task.as_str())),
    };
    for (path, name) in [("output.trajectory_csv", &output.trajectory_csv), ("output.report_json", &output.report_json)] {
        if name.is_empty() {
            return Err(ConfigError::new(path, "file name must not be empty"));
        }
    }

    Ok(ScenarioConfig { dimension: dim, metric, form, task, grid, integrate, tolerances, output })
}

fn core_message(e: &pseudohyp_core::Error) -> String {
    match e {
        pseudohyp_core::Error::Config(m) => m.clone(),
        other => other.to_string(),
    }
}

fn polynomial(terms: &[RawTerm], dim: usize, path: &str) -> Result<Polynomial> {
    for (i, t) in terms.iter().enumerate() {
        if t.exponents.len() != dim {
            return Err(ConfigError::new(
                format!("{path}[{i}].exponents"),
                format!("expected {dim} exponents, got {}", t.exponents.len()),
            ));
        }
        if !t.coeff.is_finite() {
            return Err(ConfigError::new(format!("{path}[{i}].coeff"), "coefficient must be finite"));
        }
    }
    let monomials = terms.iter().map(|t| Monomial::new(t.coeff, t.exponents.clone())).collect();
    Polynomial::new(dim, monomials).map_err(|e| ConfigError::new(path, core_message(&e)))
}

fn form_config(raw: &RawForm, dim: usize) -> Result<FormConfig> {
    let given = [raw.catalog.is_some(), raw.polynomial.is_some(), raw.em.is_some()];
    if given.iter().filter(|&&b| b).count() != 1 {
        return Err(ConfigError::new("form", "exactly one of \"catalog\", \"polynomial\" or \"em\" is required"));
    }
    if let Some(comps) = &raw.polynomial {
        if comps.len() != dim {
            return Err(ConfigError::new("form.polynomial", format!("expected {dim} components, got {}", comps.len())));
        }
        let polys = comps
            .iter()
            .enumerate()
            .map(|(i, c)| polynomial(c, dim, &format!("form.polynomial[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let spec = CovectorFieldSpec::polynomial(polys);
        spec.compile().map_err(|e| ConfigError::new("form.polynomial", core_message(&e)))?;
        return Ok(FormConfig::Field(spec));
    }
    if let Some(em) = &raw.em {
        return em_config(em).map(FormConfig::Em);
    }
    let name = raw.catalog.as_deref().unwrap_or_default();
    let form = match name {
        "exact_sphere" => CatalogForm::ExactSphere,
        "linear" => CatalogForm::Linear,
        "contact" => CatalogForm::Contact,
        "integrating_factor" => match (&raw.lambda, &raw.phi) {
            (None, None) => CatalogForm::default_integrating_factor(dim),
            (Some(l), Some(p)) => CatalogForm::IntegratingFactor {
                lambda: polynomial(l, dim, "form.lambda")?,
                phi: polynomial(p, dim, "form.phi")?,
            },
            _ => return Err(ConfigError::new("form", "integrating_factor needs both \"lambda\" and \"phi\" or neither")),
        },
        "darboux_k" => match raw.k {
            Some(k) => CatalogForm::Darboux { k },
            None => return Err(ConfigError::new("form.k", "darboux_k requires \"k\"")),
        },
        other => match other.strip_prefix("darboux_").and_then(|k| k.parse().ok()) {
            Some(k) => CatalogForm::Darboux { k },
            None => return Err(ConfigError::new("form.catalog", format!("unknown catalog form \"{other}\""))),
        },
    };
    let spec = CovectorFieldSpec::catalog(dim, form);
    spec.compile().map_err(|e| ConfigError::new("form", core_message(&e)))?;
    Ok(FormConfig::Field(spec))
}

fn em_config(raw: &RawEm) -> Result<FourPotentialSpec> {
    let need = |v: Option<f64>, key: &str| v.ok_or_else(|| ConfigError::new(format!("form.em.{key}"), format!("kind \"{}\" requires \"{key}\"", raw.kind)));
    let kind = match raw.kind.as_str() {
        "uniform_B" => PotentialKind::UniformB { b: need(raw.b, "B")? },
        "crossed_EB" => PotentialKind::CrossedEB { e: need(raw.e, "E")?, b: need(raw.b, "B")? },
        "pure_gauge" => match &raw.phi {
            Some(p) => PotentialKind::PureGauge { phi: polynomial(p, 4, "form.em.phi")? },
            None => return Err(ConfigError::new("form.em.phi", "kind \"pure_gauge\" requires \"phi\"")),
        },
        "custom" => match &raw.components {
            Some(c) if c.len() == 4 => PotentialKind::Custom {
                components: c
                    .iter()
                    .enumerate()
                    .map(|(i, t)| polynomial(t, 4, &format!("form.em.components[{i}]")))
                    .collect::<Result<Vec<_>>>()?,
            },
            Some(c) => return Err(ConfigError::new("form.em.components", format!("expected 4 components, got {}", c.len()))),
            None => return Err(ConfigError::new("form.em.components", "kind \"custom\" requires \"components\"")),
        },
        other => return Err(ConfigError::new("form.em.kind", format!("unknown potential \"{other}\""))),
    };
    let spec = FourPotentialSpec::new(kind).with_charge(raw.q.unwrap_or(1.0), raw.m.unwrap_or(1.0), raw.c.unwrap_or(1.0));
    spec.validate().map_err(|e| ConfigError::new("form.em", core_message(&e)))?;
    Ok(spec)
}

fn tolerances(raw: &RawTolerances) -> Result<Tolerances> {
    let d = Tolerances::default();
    let pick = |v: Option<f64>, default: f64, key: &str| match v {
        Some(t) if !(t.is_finite() && t > 0.0) => {
            Err(ConfigError::new(format!("tolerances.{key}"), "tolerance must be positive and finite"))
        }
        Some(t) => Ok(t),
        None => Ok(default),
    };
    Ok(Tolerances {
        zero_form: pick(raw.zero_form, d.zero_form, "zero_form")?,
        eigen_zero: pick(raw.eigen_zero, d.eigen_zero, "eigen_zero")?,
        drift: pick(raw.drift, d.drift, "drift")?,
        normality: pick(raw.normality, d.normality, "normality")?,
    })
}

fn integrate_config(raw: RawIntegrate, dim: usize, form: &FormConfig) -> Result<IntegrateConfig> {
    for (key, v) in [("x0", &raw.x0), ("v0", &raw.v0)] {
        if v.len() != dim {
            return Err(ConfigError::new(format!("integrate.{key}"), format!("expected {dim} entries, got {}", v.len())));
        }
        if v.iter().any(|c| !c.is_finite()) {
            return Err(ConfigError::new(format!("integrate.{key}"), "entries must be finite"));
        }
    }
    if !(raw.step.is_finite() && raw.step > 0.0) {
        return Err(ConfigError::new("integrate.step", "step must be positive"));
    }
    if raw.steps == 0 {
        return Err(ConfigError::new("integrate.steps", "steps must be at least 1"));
    }
    let em = matches!(form, FormConfig::Em(_));
    let em_kind = matches!(raw.kind, IntegrateKind::Lorentz | IntegrateKind::EmGeodesic);
    if em != em_kind {
        let msg = if em {
            "electromagnetic forms integrate with kind \"lorentz\" or \"em_geodesic\""
        } else {
            "kinds \"lorentz\" and \"em_geodesic\" need an \"em\" form"
        };
        return Err(ConfigError::new("integrate.kind", msg));
    }
    let lambda0 = raw.lambda0.unwrap_or(0.0);
    if !lambda0.is_finite() {
        return Err(ConfigError::new("integrate.lambda0", "lambda0 must be finite"));
    }
    Ok(IntegrateConfig {
        kind: raw.kind,
        x0: raw.x0,
        v0: raw.v0,
        lambda0,
        step: raw.step,
        steps: raw.steps,
        velocity_projection: raw.velocity_projection,
    })
}
