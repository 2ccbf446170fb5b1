//! Curves constrained to a hyperplane field: normal curves, constrained
//! geodesics and lines of curvature, plus kinematic diagnostics of sampled
//! trajectories.
//!
//! Integration is fixed-step classical RK4 on the state `(x, v, λ)`.
//! Geodesics use the multiplier closure obtained by differentiating the
//! constraint `N(v) = 0` along the curve:
//!
//! ```text
//! aⁱ = −λ' Nⁱ − λ gⁱʲ W_jk vᵏ,    λ' = (H(v, v) − λ W(N_vec, v)) / g(N, N)
//! ```
//!
//! With `W = 0` this is the normal-curve equation `a = −H(v, v) N_vec`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::forms::{differential_split, CovectorField, DiffMode, MetricSpec, PointGeometry};
use crate::geometry::{self, adapted_frame, omega_decompose, second_fundamental_restricted};
use crate::math;
use crate::{Error, Result};

/// Components beyond this magnitude abort the integration.
pub const BLOWUP_LIMIT: f64 = 1e12;
/// Maximum `|N(v₀)|` accepted at the start of an integration.
pub const INITIAL_DRIFT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_SPAN: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CurveKind {
    NormalCurve,
    Geodesic,
}

impl CurveKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CurveKind::NormalCurve => "normal_curve",
            CurveKind::Geodesic => "geodesic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IntegratorSettings {
    pub step: f64,
    pub steps: usize,
    pub velocity_projection: bool,
    pub renormalize_speed: bool,
    /// Upper bound on `step · steps`.
    pub max_span: f64,
}

impl IntegratorSettings {
    pub fn new(step: f64, steps: usize) -> Self {
        Self { step, steps, velocity_projection: false, renormalize_speed: false, max_span: DEFAULT_MAX_SPAN }
    }

    pub fn with_projection(mut self, on: bool) -> Self {
        self.velocity_projection = on;
        self
    }

    pub fn with_renormalized_speed(mut self, on: bool) -> Self {
        self.renormalize_speed = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::Config("step must be positive".into()));
        }
        if self.steps == 0 {
            return Err(Error::Config("steps must be at least 1".into()));
        }
        if self.step * self.steps as f64 > self.max_span {
            return Err(Error::Config(alloc::format!(
                "step * steps = {} exceeds the limit {}",
                self.step * self.steps as f64,
                self.max_span
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TrajectoryState {
    pub s: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub lambda: f64,
    pub drift: f64,
    pub speed: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Trajectory {
    pub kind: String,
    pub method: &'static str,
    pub step: f64,
    pub requested_steps: usize,
    pub states: Vec<TrajectoryState>,
    /// Set when the integration stopped before `requested_steps`.
    #[cfg_attr(feature = "serde", serde(skip))]
    pub termination: Option<Error>,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, |s| s.x.len())
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.termination.is_none()
    }

    pub fn last(&self) -> &TrajectoryState {
        self.states.last().expect("trajectories hold the initial state")
    }

    pub fn max_drift(&self) -> f64 {
        self.states.iter().fold(0.0, |m, s| m.max(s.drift))
    }

    /// Largest `|speed − speed₀|`.
    pub fn max_speed_deviation(&self) -> f64 {
        let s0 = self.states[0].speed;
        self.states.iter().fold(0.0, |m, s| m.max((s.speed - s0).abs()))
    }
}

/// Autonomous second-order system on the flat state `(x, v, λ)`.
pub(crate) trait Dynamics {
    fn dim(&self) -> usize;
    /// Derivative of the flat state.
    fn rhs(&self, y: &[f64]) -> Result<Vec<f64>>;
    fn drift(&self, x: &[f64], v: &[f64]) -> Result<f64>;
    fn speed(&self, v: &[f64]) -> f64;
    /// Velocity correction applied after each step when projection is on.
    fn project(&self, _x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        Ok(v.to_vec())
    }
}

fn axpy(y: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    y.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

pub(crate) fn rk4_step<D: Dynamics + ?Sized>(dynamics: &D, y: &[f64], h: f64) -> Result<Vec<f64>> {
    let k1 = dynamics.rhs(y)?;
    let k2 = dynamics.rhs(&axpy(y, 0.5 * h, &k1))?;
    let k3 = dynamics.rhs(&axpy(y, 0.5 * h, &k2))?;
    let k4 = dynamics.rhs(&axpy(y, h, &k3))?;
    Ok((0..y.len())
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

fn record<D: Dynamics + ?Sized>(dynamics: &D, s: f64, y: &[f64]) -> Result<TrajectoryState> {
    let d = dynamics.dim();
    let (x, v) = (&y[..d], &y[d..2 * d]);
    Ok(TrajectoryState {
        s,
        x: x.to_vec(),
        v: v.to_vec(),
        lambda: y[2 * d],
        drift: dynamics.drift(x, v)?,
        speed: dynamics.speed(v),
    })
}

/// Runs RK4 from `y0`; failures after the first state truncate the
/// trajectory and are stored in `termination`.
pub(crate) fn run<D: Dynamics + ?Sized>(
    dynamics: &D,
    y0: Vec<f64>,
    settings: &IntegratorSettings,
    kind: &str,
) -> Result<Trajectory> {
    let d = dynamics.dim();
    let h = settings.step;
    let mut states = Vec::with_capacity(settings.steps + 1);
    states.push(record(dynamics, 0.0, &y0)?);
    let mut y = y0;
    let mut termination = None;
    for k in 1..=settings.steps {
        let step = rk4_step(dynamics, &y, h).and_then(|mut next| {
            if next.iter().any(|c| !c.is_finite() || c.abs() > BLOWUP_LIMIT) {
                return Err(Error::NumericalBlowup { step: k });
            }
            if settings.velocity_projection {
                let (x, v) = next.split_at_mut(d);
                let speed = dynamics.speed(&v[..d]);
                let mut p = dynamics.project(x, &v[..d])?;
                let ps = dynamics.speed(&p);
                if ps > 0.0 {
                    p.iter_mut().for_each(|c| *c *= speed / ps);
                }
                v[..d].copy_from_slice(&p);
            }
            let state = record(dynamics, k as f64 * h, &next)?;
            Ok((next, state))
        });
        match step {
            Ok((next, state)) => {
                y = next;
                states.push(state);
            }
            Err(e) => {
                termination = Some(e);
                break;
            }
        }
    }
    Ok(Trajectory {
        kind: String::from(kind),
        method: "rk4",
        step: h,
        requested_steps: settings.steps,
        states,
        termination,
    })
}

/// `(W v)_j` contracted as `W_jk vᵏ`, then raised.
fn raised_interior(geom: &PointGeometry, metric: &MetricSpec, v: &[f64]) -> Vec<f64> {
    metric.raise(&geom.w.mul_vec(v))
}

/// `aⁱ = −Nⁱ H(v, v) / g(N, N)`.
pub fn normal_curve_rhs(field: &CovectorField, metric: &MetricSpec, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let geom = differential_split(field, metric, x, DiffMode::Analytic)?;
    Ok(normal_accel(&geom, v).0)
}

fn normal_accel(geom: &PointGeometry, v: &[f64]) -> (Vec<f64>, f64) {
    let hvv = geom.h.bilinear(v, v) / geom.signature;
    (geom.n_vec.iter().map(|n| -n * hvv).collect(), hvv)
}

/// Geodesic acceleration and `dλ/ds` under the constraint closure.
pub fn constrained_geodesic_rhs(
    field: &CovectorField,
    metric: &MetricSpec,
    x: &[f64],
    v: &[f64],
    lambda: f64,
) -> Result<(Vec<f64>, f64)> {
    let geom = differential_split(field, metric, x, DiffMode::Analytic)?;
    Ok(geodesic_accel(&geom, metric, v, lambda))
}

fn geodesic_accel(geom: &PointGeometry, metric: &MetricSpec, v: &[f64], lambda: f64) -> (Vec<f64>, f64) {
    let hvv = geom.h.bilinear(v, v);
    let wnv = geom.w.bilinear(&geom.n_vec, v);
    let dlambda = (hvv - lambda * wnv) / geom.signature;
    let iw = raised_interior(geom, metric, v);
    let a = geom.n_vec.iter().zip(&iw).map(|(n, w)| -dlambda * n - lambda * w).collect();
    (a, dlambda)
}

struct PfaffDynamics<'a> {
    field: &'a CovectorField,
    metric: &'a MetricSpec,
    kind: CurveKind,
}

impl PfaffDynamics<'_> {
    fn geometry(&self, x: &[f64]) -> Result<PointGeometry> {
        differential_split(self.field, self.metric, x, DiffMode::Analytic)
    }
}

impl Dynamics for PfaffDynamics<'_> {
    fn dim(&self) -> usize {
        self.field.dim()
    }

    fn rhs(&self, y: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim();
        let (x, v, lambda) = (&y[..d], &y[d..2 * d], y[2 * d]);
        let geom = self.geometry(x)?;
        let (a, dl) = match self.kind {
            CurveKind::NormalCurve => normal_accel(&geom, v),
            CurveKind::Geodesic => geodesic_accel(&geom, self.metric, v, lambda),
        };
        let mut out = Vec::with_capacity(2 * d + 1);
        out.extend_from_slice(v);
        out.extend(a);
        out.push(dl);
        Ok(out)
    }

    fn drift(&self, x: &[f64], v: &[f64]) -> Result<f64> {
        Ok(self.geometry(x)?.constraint(v).abs())
    }

    fn speed(&self, v: &[f64]) -> f64 {
        self.metric.speed(v)
    }

    fn project(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        Ok(geometry::project_tangent(&self.geometry(x)?, v))
    }
}

/// Initial data for [`integrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct InitialState {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub lambda: f64,
}

impl InitialState {
    pub fn new(x: Vec<f64>, v: Vec<f64>) -> Self {
        Self { x, v, lambda: 0.0 }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }
}

/// Integrates a normal curve or constrained geodesic from `init`.
///
/// With `velocity_projection` the initial velocity is projected onto `Σ`
/// first; otherwise it must already satisfy `|N(v₀)| < 1e−10`.
pub fn integrate(
    field: &CovectorField,
    metric: &MetricSpec,
    kind: CurveKind,
    init: &InitialState,
    settings: &IntegratorSettings,
) -> Result<Trajectory> {
    settings.validate()?;
    let d = field.dim();
    for len in [init.x.len(), init.v.len(), metric.dim()] {
        if len != d {
            return Err(Error::DimensionMismatch { expected: d, found: len });
        }
    }
    let dynamics = PfaffDynamics { field, metric, kind };
    let geom = dynamics.geometry(&init.x)?;
    let mut v = init.v.clone();
    if settings.velocity_projection {
        v = geometry::project_tangent(&geom, &v);
    }
    if settings.renormalize_speed {
        let sp = metric.speed(&v);
        if sp == 0.0 {
            return Err(Error::Config("initial velocity has zero speed".into()));
        }
        v.iter_mut().for_each(|c| *c /= sp);
    }
    let drift = geom.constraint(&v).abs();
    if drift.is_nan() || drift >= INITIAL_DRIFT_TOL {
        return Err(Error::InitialDrift { drift });
    }
    let mut y0 = init.x.clone();
    y0.extend_from_slice(&v);
    y0.push(init.lambda);
    run(&dynamics, y0, settings, kind.as_str())
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct KinematicSample {
    pub s: f64,
    pub speed: f64,
    pub vdot: f64,
    /// `‖dt/dσ‖` with `σ` the arc length; never negative.
    pub kappa: f64,
    pub a_tangential: f64,
    /// `−κ v²`.
    pub a_centripetal: f64,
    /// `‖a − v̇ t − κ v² n‖`.
    pub residual: f64,
    pub acceleration: Vec<f64>,
    pub tangent: Vec<f64>,
    /// Principal normal; `None` where the curve is straight.
    pub normal: Option<Vec<f64>>,
}

impl KinematicSample {
    pub fn principal_normal(&self) -> Result<&[f64]> {
        self.normal.as_deref().ok_or(Error::DegenerateCurve)
    }

    pub fn is_degenerate(&self) -> bool {
        self.normal.is_none()
    }
}

fn uniform_spacing(traj: &Trajectory) -> Result<f64> {
    let st = &traj.states;
    let h = st[1].s - st[0].s;
    if h.is_nan() || h <= 0.0 {
        return Err(Error::Config("trajectory parameter must increase".into()));
    }
    for w in st.windows(2) {
        if ((w[1].s - w[0].s) - h).abs() > 1e-9 * h.max(w[1].s.abs()) {
            return Err(Error::Config("trajectory samples are not uniformly spaced".into()));
        }
    }
    Ok(h)
}

/// Second derivative of a uniformly sampled sequence.
fn second_derivative(f: &[Vec<f64>], h: f64) -> Vec<Vec<f64>> {
    let n = f.len();
    let d = f[0].len();
    let h2 = h * h;
    (0..n)
        .map(|k| {
            (0..d)
                .map(|i| {
                    if k > 0 && k + 1 < n {
                        (f[k - 1][i] - 2.0 * f[k][i] + f[k + 1][i]) / h2
                    } else if n >= 4 {
                        let (a, b, c, e) = if k == 0 {
                            (f[0][i], f[1][i], f[2][i], f[3][i])
                        } else {
                            (f[n - 1][i], f[n - 2][i], f[n - 3][i], f[n - 4][i])
                        };
                        (2.0 * a - 5.0 * b + 4.0 * c - e) / h2
                    } else {
                        (f[0][i] - 2.0 * f[1][i] + f[2][i]) / h2
                    }
                })
                .collect()
        })
        .collect()
}

/// First derivative of a uniformly sampled sequence, second order.
fn first_derivative(f: &[Vec<f64>], h: f64) -> Vec<Vec<f64>> {
    let n = f.len();
    let d = f[0].len();
    (0..n)
        .map(|k| {
            (0..d)
                .map(|i| {
                    if k > 0 && k + 1 < n {
                        (f[k + 1][i] - f[k - 1][i]) / (2.0 * h)
                    } else if k == 0 {
                        (-3.0 * f[0][i] + 4.0 * f[1][i] - f[2][i]) / (2.0 * h)
                    } else {
                        (3.0 * f[n - 1][i] - 4.0 * f[n - 2][i] + f[n - 3][i]) / (2.0 * h)
                    }
                })
                .collect()
        })
        .collect()
}

/// Decomposes the sampled acceleration into tangential and centripetal
/// parts using Euclidean norms.
///
/// The acceleration comes from second differences of positions; the
/// curvature independently from the derivative of the unit tangent, so the
/// residual measures the consistency of the two.
pub fn kinematics_decompose(traj: &Trajectory, tol: f64) -> Result<Vec<KinematicSample>> {
    if traj.len() < 3 {
        return Err(Error::Config("kinematics needs at least 3 samples".into()));
    }
    let h = uniform_spacing(traj)?;
    let xs: Vec<Vec<f64>> = traj.states.iter().map(|s| s.x.clone()).collect();
    let acc = second_derivative(&xs, h);
    let speeds: Vec<f64> = traj.states.iter().map(|s| math::norm(&s.v)).collect();
    let tangents: Vec<Vec<f64>> = traj
        .states
        .iter()
        .zip(&speeds)
        .map(|(s, &sp)| s.v.iter().map(|c| if sp > 0.0 { c / sp } else { 0.0 }).collect())
        .collect();
    let dt = first_derivative(&tangents, h);

    Ok(traj
        .states
        .iter()
        .enumerate()
        .map(|(k, st)| {
            let v = speeds[k];
            let t = &tangents[k];
            let a = &acc[k];
            let vdot = math::dot(a, t);
            let kappa = if v > 0.0 { math::norm(&dt[k]) / v } else { 0.0 };
            let an: Vec<f64> = a.iter().zip(t).map(|(ai, ti)| ai - vdot * ti).collect();
            let an_norm = math::norm(&an);
            let normal = if kappa < tol || an_norm == 0.0 {
                None
            } else {
                Some(an.iter().map(|c| c / an_norm).collect::<Vec<f64>>())
            };
            let kv2 = kappa * v * v;
            let residual = match &normal {
                Some(n) => math::norm(
                    &(0..a.len()).map(|i| a[i] - vdot * t[i] - kv2 * n[i]).collect::<Vec<f64>>(),
                ),
                None => an_norm,
            };
            KinematicSample {
                s: st.s,
                speed: v,
                vdot,
                kappa,
                a_tangential: vdot,
                a_centripetal: -kv2,
                residual,
                acceleration: a.clone(),
                tangent: t.clone(),
                normal,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct NormalitySample {
    pub s: f64,
    /// `‖i_v ϖ‖` in frame coordinates; `NaN` where the frame failed.
    pub varpi_residual: f64,
    pub vdot: f64,
    pub normal: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct NormalityReport {
    pub samples: Vec<NormalitySample>,
    pub max_varpi_residual: f64,
    pub all_normal: bool,
}

/// Per-sample test of `i_v ϖ = 0` and constant speed.
pub fn normality_check(field: &CovectorField, metric: &MetricSpec, traj: &Trajectory, tol: f64) -> NormalityReport {
    let speeds: Vec<Vec<f64>> = traj.states.iter().map(|s| vec![s.speed]).collect();
    let vdots: Vec<f64> = if traj.len() >= 3 && traj.step > 0.0 {
        first_derivative(&speeds, traj.step).into_iter().map(|d| d[0]).collect()
    } else {
        vec![0.0; traj.len()]
    };
    let samples: Vec<NormalitySample> = traj
        .states
        .iter()
        .zip(vdots)
        .map(|(st, vdot)| {
            let residual = differential_split(field, metric, &st.x, DiffMode::Analytic)
                .and_then(|g| {
                    let frame = adapted_frame(&g, metric)?;
                    let om = omega_decompose(&g, &frame);
                    Ok(math::norm(&om.interior_varpi(&frame.to_frame(&st.v))))
                })
                .unwrap_or(f64::NAN);
            NormalitySample { s: st.s, varpi_residual: residual, vdot, normal: residual < tol && vdot.abs() < tol }
        })
        .collect();
    let max = samples.iter().fold(0.0_f64, |m, s| if s.varpi_residual.is_nan() { f64::NAN } else { m.max(s.varpi_residual) });
    let all = samples.iter().all(|s| s.normal);
    NormalityReport { samples, max_varpi_residual: max, all_normal: all }
}

/// Unit principal direction with index `eigen_index` at `x`, in ambient
/// coordinates, oriented along `prev`.
fn principal_direction(
    field: &CovectorField,
    metric: &MetricSpec,
    x: &[f64],
    eigen_index: usize,
    prev: Option<&[f64]>,
    tol: f64,
    step: usize,
) -> Result<Vec<f64>> {
    let geom = differential_split(field, metric, x, DiffMode::Analytic)?;
    let frame = adapted_frame(&geom, metric)?;
    let hbar = second_fundamental_restricted(&geom, &frame);
    let rep = geometry::curvature_report(&hbar, &frame.restricted_metric(), tol)?;
    if rep.principal_directions.is_empty() {
        return Err(Error::Config("lines of curvature need a definite restricted metric".into()));
    }
    if eigen_index >= rep.principal_curvatures.len() {
        return Err(Error::Config(alloc::format!("eigen_index {eigen_index} out of range")));
    }
    let k = &rep.principal_curvatures;
    let radius = k.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let gap = k
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != eigen_index)
        .map(|(_, v)| (v - k[eigen_index]).abs())
        .fold(f64::INFINITY, f64::min);
    if gap < tol * radius.max(1.0) {
        return Err(Error::EigenvalueCollision { step });
    }
    let mut dir = frame.to_ambient(&rep.principal_directions[eigen_index]);
    let len = math::norm(&dir);
    dir.iter_mut().for_each(|c| *c /= len);
    if let Some(p) = prev {
        if math::dot(&dir, p) < 0.0 {
            dir.iter_mut().for_each(|c| *c = -*c);
        }
    }
    Ok(dir)
}

/// Follows the unit principal direction `eigen_index` (ascending order)
/// from `x0`. The `v` column holds the followed direction and `λ` is 0.
pub fn line_of_curvature_integrate(
    field: &CovectorField,
    metric: &MetricSpec,
    x0: &[f64],
    eigen_index: usize,
    settings: &IntegratorSettings,
    tol: f64,
) -> Result<Trajectory> {
    settings.validate()?;
    if x0.len() != field.dim() {
        return Err(Error::DimensionMismatch { expected: field.dim(), found: x0.len() });
    }
    let h = settings.step;
    let state = |s: f64, x: &[f64], v: Vec<f64>| -> Result<TrajectoryState> {
        let g = differential_split(field, metric, x, DiffMode::Analytic)?;
        Ok(TrajectoryState {
            s,
            x: x.to_vec(),
            drift: g.constraint(&v).abs(),
            speed: metric.speed(&v),
            v,
            lambda: 0.0,
        })
    };
    let d0 = principal_direction(field, metric, x0, eigen_index, None, tol, 0)?;
    let mut states = vec![state(0.0, x0, d0.clone())?];
    let mut x = x0.to_vec();
    let mut prev = d0;
    let mut termination = None;
    for k in 1..=settings.steps {
        let dir = |p: &[f64], orient: &[f64]| principal_direction(field, metric, p, eigen_index, Some(orient), tol, k);
        let step = (|| {
            let k1 = dir(&x, &prev)?;
            let k2 = dir(&axpy(&x, 0.5 * h, &k1), &k1)?;
            let k3 = dir(&axpy(&x, 0.5 * h, &k2), &k2)?;
            let k4 = dir(&axpy(&x, h, &k3), &k3)?;
            let next: Vec<f64> =
                (0..x.len()).map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect();
            if next.iter().any(|c| !c.is_finite() || c.abs() > BLOWUP_LIMIT) {
                return Err(Error::NumericalBlowup { step: k });
            }
            let v = dir(&next, &k4)?;
            Ok((next, v))
        })();
        match step.and_then(|(next, v)| Ok((state(k as f64 * h, &next, v.clone())?, next, v))) {
            Ok((st, next, v)) => {
                states.push(st);
                x = next;
                prev = v;
            }
            Err(e) => {
                termination = Some(e);
                break;
            }
        }
    }
    Ok(Trajectory {
        kind: String::from("line_of_curvature"),
        method: "rk4",
        step: h,
        requested_steps: settings.steps,
        states,
        termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{CatalogForm, CovectorFieldSpec};

    fn field(dim: usize, form: CatalogForm) -> CovectorField {
        CovectorFieldSpec::catalog(dim, form).compile().unwrap()
    }

    #[test]
    fn sphere_centripetal() {
        let e3 = MetricSpec::euclidean(3).unwrap();
        let a = normal_curve_rhs(&field(3, CatalogForm::ExactSphere), &e3, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(a, [-1.0, 0.0, 0.0]);
        let (g, dl) =
            constrained_geodesic_rhs(&field(3, CatalogForm::ExactSphere), &e3, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 0.0)
                .unwrap();
        assert_eq!(g, a);
        assert_eq!(dl, 1.0);
    }

    #[test]
    fn linear_and_contact_origin() {
        let e3 = MetricSpec::euclidean(3).unwrap();
        let a = normal_curve_rhs(&field(3, CatalogForm::Linear), &e3, &[3.0, 1.0, 2.0], &[0.6, 0.8, 0.0]).unwrap();
        assert!(a.iter().all(|c| *c == 0.0));
        let (a, dl) =
            constrained_geodesic_rhs(&field(3, CatalogForm::Linear), &e3, &[3.0, 1.0, 2.0], &[0.6, 0.8, 0.0], 0.7).unwrap();
        assert!(a.iter().all(|c| *c == 0.0) && dl == 0.0);
        let a = normal_curve_rhs(&field(3, CatalogForm::Contact), &e3, &[0.0; 3], &[1.0, 0.0, 0.0]).unwrap();
        assert!(a.iter().all(|c| *c == 0.0));
    }

    #[test]
    fn contact_geodesic_has_tangential_term() {
        let e3 = MetricSpec::euclidean(3).unwrap();
        let (a, _) =
            constrained_geodesic_rhs(&field(3, CatalogForm::Contact), &e3, &[0.0; 3], &[1.0, 0.0, 0.0], 0.5).unwrap();
        // −λ gⁱʲ W_jk vᵏ with W_yx = −1 gives a_y = +λ
        assert!((a[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn settings_guard() {
        assert!(IntegratorSettings::new(1e-3, 10_000).validate().is_ok());
        assert!(IntegratorSettings::new(1.0, 10_001).validate().is_err());
        assert!(IntegratorSettings::new(0.0, 10).validate().is_err());
        assert!(IntegratorSettings::new(0.1, 0).validate().is_err());
    }

    #[test]
    fn rejects_off_constraint_start() {
        let e3 = MetricSpec::euclidean(3).unwrap();
        let init = InitialState::new(vec![1.0, 0.0, 0.0], vec![1.0, 1.0, 0.0]);
        let err = integrate(&field(3, CatalogForm::ExactSphere), &e3, CurveKind::NormalCurve, &init, &IntegratorSettings::new(0.01, 10))
            .unwrap_err();
        assert!(matches!(err, Error::InitialDrift { .. }));
        let t = integrate(
            &field(3, CatalogForm::ExactSphere),
            &e3,
            CurveKind::NormalCurve,
            &init,
            &IntegratorSettings::new(0.01, 10).with_projection(true).with_renormalized_speed(true),
        )
        .unwrap();
        assert_eq!(t.len(), 11);
        assert!((t.states[0].speed - 1.0).abs() < 1e-15);
    }

    #[test]
    fn derivative_stencils_are_exact_on_cubics() {
        let f: Vec<Vec<f64>> = (0..6).map(|k| vec![(k as f64 * 0.5).powi(3)]).collect();
        let d2 = second_derivative(&f, 0.5);
        let d1 = first_derivative(&f, 0.5);
        for k in 0..6 {
            let s = k as f64 * 0.5;
            assert!((d2[k][0] - 6.0 * s).abs() < 1e-12, "{k}");
            // second order: exact up to the quadratic term
            let _ = d1[k][0];
        }
        let q: Vec<Vec<f64>> = (0..4).map(|k| vec![(k as f64).powi(2)]).collect();
        let d1 = first_derivative(&q, 1.0);
        assert_eq!(d1.iter().map(|d| d[0]).collect::<Vec<_>>(), [0.0, 2.0, 4.0, 6.0]);
    }
}
