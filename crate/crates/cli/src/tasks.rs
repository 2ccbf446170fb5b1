//! Task dispatch and the exit-code contract.

use std::path::{Path, PathBuf};

use pseudohyp_core::curves::{integrate, normality_check, InitialState, IntegratorSettings, NormalityReport, Trajectory};
use pseudohyp_core::em::{build_bundle_form, constrained_geodesic_em, em_point_report, lorentz_integrate, summarize, EmReport};
use pseudohyp_core::forms::{CovectorField, DiffMode, MetricSpec};
use pseudohyp_core::geometry::{analyze_point, PointCurvature};
use pseudohyp_core::grid::GridSpec;
use pseudohyp_core::pfaff::{integrability_class_at_point, RegionReport};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{ConfigError, FormConfig, IntegrateConfig, IntegrateKind, ScenarioConfig, Task};
use crate::output::{to_json, trajectory_csv, write_atomic};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

/// Thread count for grid tasks; unset or 0 means one per core.
pub const THREADS_ENV: &str = "PSEUDOHYP_THREADS";

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Numerical(pseudohyp_core::Error),
    Io { path: PathBuf, source: std::io::Error },
    VerifyFailed { failed: Vec<u32>, lines: Vec<String> },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Numerical(_) | RunError::Io { .. } => EXIT_NUMERICAL,
            RunError::VerifyFailed { .. } => EXIT_VERIFY,
        }
    }

    /// Single-line JSON for standard error.
    pub fn diagnostic(&self) -> String {
        let code = self.exit_code();
        let v = match self {
            RunError::Config(e) => json!({
                "error": "ConfigError",
                "exit_code": code,
                "path": e.path,
                "message": e.to_string(),
            }),
            RunError::Numerical(e) => json!({
                "error": e.kind(),
                "exit_code": code,
                "message": e.to_string(),
            }),
            RunError::Io { path, source } => json!({
                "error": "IoError",
                "exit_code": code,
                "path": path.display().to_string(),
                "message": source.to_string(),
            }),
            RunError::VerifyFailed { failed, .. } => json!({
                "error": "VerifyFailed",
                "exit_code": code,
                "failed_criteria": failed,
                "message": format!("{} acceptance criteria failed", failed.len()),
            }),
        };
        v.to_string()
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Numerical(e) => write!(f, "{e}"),
            RunError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            RunError::VerifyFailed { failed, .. } => write!(f, "failed criteria {failed:?}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<pseudohyp_core::Error> for RunError {
    fn from(e: pseudohyp_core::Error) -> Self {
        use pseudohyp_core::Error as E;
        match e {
            E::Config(m) => RunError::Config(ConfigError::new("", m)),
            E::DimensionMismatch { .. } | E::InitialDrift { .. } => RunError::Config(ConfigError::new("", e.to_string())),
            other => RunError::Numerical(other),
        }
    }
}

pub type RunResult<T> = std::result::Result<T, RunError>;

/// What a task produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<PathBuf>,
    /// Human-readable lines for standard output.
    pub lines: Vec<String>,
}

fn thread_pool() -> rayon::ThreadPool {
    let n = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(0);
    rayon::ThreadPoolBuilder::new().num_threads(n).build().expect("thread pool")
}

/// Maps grid points through `f` in parallel, keeping grid order.
fn par_grid<T: Send>(grid: &GridSpec, f: impl Fn(&[f64]) -> T + Sync + Send) -> Vec<(Vec<f64>, T)> {
    let points: Vec<Vec<f64>> = grid.points().collect();
    thread_pool().install(|| {
        points
            .into_par_iter()
            .map(|x| {
                let r = f(&x);
                (x, r)
            })
            .collect()
    })
}

fn write(path: &Path, bytes: &[u8], out: &mut Outcome) -> RunResult<()> {
    write_atomic(path, bytes).map_err(|source| RunError::Io { path: path.to_path_buf(), source })?;
    out.artifacts.push(path.to_path_buf());
    Ok(())
}

fn resolve(out_dir: Option<&Path>, name: &str) -> PathBuf {
    match out_dir {
        Some(d) => d.join(name),
        None => PathBuf::from(name),
    }
}

pub fn run_task(cfg: &ScenarioConfig, out_dir: Option<&Path>) -> RunResult<Outcome> {
    let report_path = resolve(out_dir, &cfg.output.report_json);
    let mut out = Outcome::default();
    match cfg.task {
        Task::Classify => {
            let report = classify(cfg)?;
            write(&report_path, to_json(&report).as_bytes(), &mut out)?;
        }
        Task::Curvature => {
            let entries = curvature(cfg)?;
            write(&report_path, to_json(&entries).as_bytes(), &mut out)?;
        }
        Task::Integrate => {
            let csv_path = resolve(out_dir, &cfg.output.trajectory_csv);
            let run = integrate_scenario(cfg, None)?;
            write(&csv_path, trajectory_csv(&run.trajectory).as_bytes(), &mut out)?;
            let summary = IntegrationSummary::new(cfg, &run, &cfg.output.trajectory_csv);
            write(&report_path, to_json(&summary).as_bytes(), &mut out)?;
            if let Some(e) = run.trajectory.termination.clone() {
                return Err(RunError::Numerical(e));
            }
        }
        Task::Verify => return run_verify(&report_path),
    }
    Ok(out)
}

/// Runs the acceptance suite and writes its report to `report_path`.
pub fn run_verify(report_path: &Path) -> RunResult<Outcome> {
    let mut out = Outcome::default();
    let report = verify::run_suite();
    out.lines = report.lines();
    write(report_path, to_json(&report).as_bytes(), &mut out)?;
    let failed = report.failed();
    if failed.is_empty() {
        Ok(out)
    } else {
        Err(RunError::VerifyFailed { failed, lines: out.lines })
    }
}

// ---- classify ----

#[derive(Debug, Serialize)]
pub struct ClassifyReport {
    pub task: &'static str,
    pub form: String,
    pub metric: Vec<f64>,
    pub grid: GridSpec,
    pub zero_form_tolerance: f64,
    #[serde(flatten)]
    pub region: RegionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub em: Option<EmReport>,
}

fn grid_of(cfg: &ScenarioConfig) -> RunResult<&GridSpec> {
    cfg.grid.as_ref().ok_or_else(|| RunError::Config(ConfigError::new("grid", "missing grid block")))
}

/// The Pfaffian field and metric a scenario is posed on. Electromagnetic
/// forms are lifted to the bundle form on ℝ⁴ × ℝ.
fn field_and_metric(cfg: &ScenarioConfig) -> RunResult<(CovectorField, MetricSpec, String)> {
    match &cfg.form {
        FormConfig::Field(spec) => Ok((spec.compile()?, cfg.metric.clone(), spec.label())),
        FormConfig::Em(pot) => {
            let spec = build_bundle_form(pot)?;
            Ok((spec.compile()?, MetricSpec::bundle5(), format!("em:{}", pot.name())))
        }
    }
}

fn lift(cfg: &ScenarioConfig, x: &[f64]) -> Vec<f64> {
    let mut p = x.to_vec();
    if matches!(cfg.form, FormConfig::Em(_)) {
        p.push(0.0);
    }
    p
}

pub fn classify(cfg: &ScenarioConfig) -> RunResult<ClassifyReport> {
    let grid = grid_of(cfg)?;
    let tol = cfg.tolerances.zero_form;
    let (field, metric, label) = field_and_metric(cfg)?;
    let results = par_grid(grid, |x| integrability_class_at_point(&field, &metric, &lift(cfg, x), tol));
    let region = RegionReport::from_results(results);
    let em = match &cfg.form {
        FormConfig::Em(pot) => {
            let samples = par_grid(grid, |x| em_point_report(pot, x, tol));
            let samples = samples.into_iter().map(|(_, r)| r).collect::<Result<Vec<_>, _>>()?;
            Some(summarize(pot, samples))
        }
        FormConfig::Field(_) => None,
    };
    Ok(ClassifyReport {
        task: "classify",
        form: label,
        metric: cfg.metric.diag().to_vec(),
        grid: grid.clone(),
        zero_form_tolerance: tol,
        region,
        em,
    })
}

// ---- curvature ----

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum CurvatureEntry {
    Point(Box<PointCurvature>),
    Exceptional { x: Vec<f64>, error: &'static str, message: String },
}

pub fn curvature(cfg: &ScenarioConfig) -> RunResult<Vec<CurvatureEntry>> {
    let grid = grid_of(cfg)?;
    let (field, metric, _) = field_and_metric(cfg)?;
    let tol = cfg.tolerances.eigen_zero;
    Ok(par_grid(grid, |x| analyze_point(&field, &metric, &lift(cfg, x), DiffMode::Analytic, tol))
        .into_iter()
        .map(|(x, r)| match r {
            Ok(p) => CurvatureEntry::Point(Box::new(p)),
            Err(e) => CurvatureEntry::Exceptional { x: lift(cfg, &x), error: e.kind(), message: e.to_string() },
        })
        .collect())
}

// ---- integrate ----

pub struct IntegrationRun {
    pub trajectory: Trajectory,
    pub normality: Option<NormalityReport>,
}

fn integrate_block(cfg: &ScenarioConfig) -> RunResult<&IntegrateConfig> {
    cfg.integrate.as_ref().ok_or_else(|| RunError::Config(ConfigError::new("integrate", "missing integrate block")))
}

/// Integrates the scenario; `projection` overrides the configured
/// velocity-projection flag.
pub fn integrate_scenario(cfg: &ScenarioConfig, projection: Option<bool>) -> RunResult<IntegrationRun> {
    let ic = integrate_block(cfg)?;
    let settings = IntegratorSettings::new(ic.step, ic.steps)
        .with_projection(projection.unwrap_or(ic.velocity_projection));
    let tol = cfg.tolerances.normality;
    match (&cfg.form, ic.kind.curve_kind()) {
        (FormConfig::Field(spec), Some(kind)) => {
            let field = spec.compile()?;
            let init = InitialState::new(ic.x0.clone(), ic.v0.clone()).with_lambda(ic.lambda0);
            let trajectory = integrate(&field, &cfg.metric, kind, &init, &settings)?;
            let normality = Some(normality_check(&field, &cfg.metric, &trajectory, tol));
            Ok(IntegrationRun { trajectory, normality })
        }
        (FormConfig::Em(pot), None) => {
            if ic.kind == IntegrateKind::Lorentz {
                let trajectory = lorentz_integrate(pot, &ic.x0, &ic.v0, &settings)?;
                Ok(IntegrationRun { trajectory, normality: None })
            } else {
                let trajectory = constrained_geodesic_em(pot, &ic.x0, &ic.v0, &settings)?;
                let field = build_bundle_form(pot)?.compile()?;
                let normality = Some(normality_check(&field, &MetricSpec::bundle5(), &trajectory, tol));
                Ok(IntegrationRun { trajectory, normality })
            }
        }
        _ => Err(RunError::Config(ConfigError::new("integrate.kind", "kind does not match the form"))),
    }
}

#[derive(Debug, Serialize)]
pub struct Endpoint {
    pub s: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub lambda: f64,
}

#[derive(Debug, Serialize)]
pub struct SpeedStats {
    pub initial: f64,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub max_deviation: f64,
}

#[derive(Debug, Serialize)]
pub struct NormalityVerdict {
    pub tolerance: f64,
    pub all_normal: bool,
    pub max_varpi_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct Termination {
    pub error: &'static str,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct IntegrationSummary {
    pub task: &'static str,
    pub kind: &'static str,
    pub method: &'static str,
    pub dimension: usize,
    pub step: f64,
    pub requested_steps: usize,
    pub completed_steps: usize,
    pub complete: bool,
    pub termination: Option<Termination>,
    pub velocity_projection: bool,
    pub endpoint: Endpoint,
    pub max_drift: f64,
    pub drift_tolerance: f64,
    pub drift_within_tolerance: bool,
    pub speed: SpeedStats,
    pub normality: Option<NormalityVerdict>,
    pub trajectory_csv: String,
}

impl IntegrationSummary {
    pub fn new(cfg: &ScenarioConfig, run: &IntegrationRun, csv_name: &str) -> Self {
        let ic = cfg.integrate.as_ref().expect("integrate block");
        let t = &run.trajectory;
        let last = t.last();
        let speeds: Vec<f64> = t.states.iter().map(|s| s.speed).collect();
        let min = speeds.iter().copied().fold(f64::INFINITY, f64::min);
        let max = speeds.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let max_drift = t.max_drift();
        Self {
            task: "integrate",
            kind: ic.kind.as_str(),
            method: t.method,
            dimension: t.dim(),
            step: t.step,
            requested_steps: t.requested_steps,
            completed_steps: t.len() - 1,
            complete: t.is_complete(),
            termination: t.termination.as_ref().map(|e| Termination { error: e.kind(), message: e.to_string() }),
            velocity_projection: ic.velocity_projection,
            endpoint: Endpoint { s: last.s, x: last.x.clone(), v: last.v.clone(), lambda: last.lambda },
            max_drift,
            drift_tolerance: cfg.tolerances.drift,
            drift_within_tolerance: max_drift < cfg.tolerances.drift,
            speed: SpeedStats {
                initial: speeds[0],
                min,
                max,
                mean: speeds.iter().sum::<f64>() / speeds.len() as f64,
                max_deviation: t.max_speed_deviation(),
            },
            normality: run.normality.as_ref().map(|n| NormalityVerdict {
                tolerance: cfg.tolerances.normality,
                all_normal: n.all_normal,
                max_varpi_residual: n.max_varpi_residual,
            }),
            trajectory_csv: csv_name.to_string(),
        }
    }
}
