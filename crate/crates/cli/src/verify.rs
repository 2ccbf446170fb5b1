//! The built-in acceptance suite behind `--task verify`.
//!
//! Every criterion compares library output against an independent oracle
//! (closed forms, finite differences, or a second integrator) at a fixed
//! tolerance. Randomized checks use seeded generators so that the report is
//! reproducible byte for byte.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use pseudohyp_core::curves::{integrate, normality_check, CurveKind, InitialState, IntegratorSettings, Trajectory};
use pseudohyp_core::em::{
    build_bundle_form, constrained_geodesic_em, em_integrability_report, lorentz_integrate, trajectory_compare,
    FourPotentialSpec, PotentialKind,
};
use pseudohyp_core::forms::{differential_split, CatalogForm, CovectorField, CovectorFieldSpec, DiffMode, MetricSpec};
use pseudohyp_core::geometry::{analyze_point, PointClass, DEFAULT_EIGEN_ZERO};
use pseudohyp_core::grid::GridSpec;
use pseudohyp_core::pfaff::frobenius_three_form;
use pseudohyp_core::poly::{Monomial, Polynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{parse_config, Task};
use crate::output::to_json;
use crate::scenarios::SCENARIOS;
use crate::tasks::integrate_scenario;

pub const CRITERIA: u32 = 10;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub measurements: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CriterionResult {
    fn new(id: u32, name: &'static str) -> Self {
        Self { id, name, passed: true, measurements: BTreeMap::new(), notes: Vec::new() }
    }

    /// Records `value` and requires `ok`.
    fn check(&mut self, key: impl Into<String>, value: f64, ok: bool) {
        let key = key.into();
        if !ok {
            self.passed = false;
            self.notes.push(format!("{key} = {value:e} out of bounds"));
        }
        self.measurements.insert(key, value);
    }

    fn below(&mut self, key: impl Into<String>, value: f64, bound: f64) {
        self.check(key, value, value < bound);
    }

    fn fail(&mut self, note: impl Into<String>) {
        self.passed = false;
        self.notes.push(note.into());
    }

    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!("criterion {:>2} {verdict} {}", self.id, self.name);
        let parts: Vec<String> = self.measurements.iter().map(|(k, v)| format!("{k}={v:.3e}")).collect();
        if !parts.is_empty() {
            s.push_str(": ");
            s.push_str(&parts.join(" "));
        }
        for n in &self.notes {
            s.push_str(" | ");
            s.push_str(n);
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub criteria: Vec<CriterionResult>,
    pub passed: usize,
    pub total: usize,
}

impl SuiteReport {
    fn new(criteria: Vec<CriterionResult>) -> Self {
        let passed = criteria.iter().filter(|c| c.passed).count();
        Self { total: criteria.len(), passed, criteria }
    }

    pub fn failed(&self) -> Vec<u32> {
        self.criteria.iter().filter(|c| !c.passed).map(|c| c.id).collect()
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out: Vec<String> = self.criteria.iter().map(CriterionResult::line).collect();
        out.push(format!("{}/{} criteria passed", self.passed, self.total));
        out
    }
}

type Check = fn() -> CriterionResult;

const CHECKS: [Check; 9] = [
    frobenius_classification,
    sphere_curvature,
    minimal_harmonic,
    geodesic_normal_curve,
    contact_non_normality,
    constraint_preservation,
    lorentz_equivalence,
    em_degrees,
    numerics_hygiene,
];

/// Runs criterion `id` (1 to 10) on its own.
pub fn run_criterion(id: u32) -> Option<CriterionResult> {
    match id {
        1..=9 => Some(CHECKS[id as usize - 1]()),
        10 => Some(determinism()),
        _ => None,
    }
}

pub fn run_suite() -> SuiteReport {
    let mut criteria: Vec<CriterionResult> = CHECKS.iter().map(|c| c()).collect();
    criteria.push(determinism());
    SuiteReport::new(criteria)
}

// ---- helpers ----

fn field(dim: usize, form: CatalogForm) -> CovectorField {
    CovectorFieldSpec::catalog(dim, form).compile().expect("catalog form")
}

fn euclid(dim: usize) -> MetricSpec {
    MetricSpec::euclidean(dim).expect("euclidean metric")
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Points at radius `r` in several directions.
fn sphere_points(r: f64) -> Vec<Vec<f64>> {
    [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.6, -0.6, 0.35], [-0.3, 0.8, -0.5]]
        .iter()
        .map(|d| {
            let n = d.iter().map(|c| c * c).sum::<f64>().sqrt();
            d.iter().map(|c| r * c / n).collect()
        })
        .collect()
}

/// `∂_i Nⁱ` of the unit field by central differences.
fn fd_divergence(f: &CovectorField, m: &MetricSpec, x: &[f64]) -> Result<f64, pseudohyp_core::Error> {
    let h = 1e-5;
    let mut sum = 0.0;
    for i in 0..x.len() {
        let mut p = x.to_vec();
        p[i] += h;
        let up = differential_split(f, m, &p, DiffMode::Analytic)?.n_vec[i];
        p[i] -= 2.0 * h;
        let dn = differential_split(f, m, &p, DiffMode::Analytic)?.n_vec[i];
        sum += (up - dn) / (2.0 * h);
    }
    Ok(sum)
}

fn sphere_run(kind: CurveKind, step: f64, steps: usize) -> Result<Trajectory, pseudohyp_core::Error> {
    let init = InitialState::new(vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]);
    integrate(&field(3, CatalogForm::ExactSphere), &euclid(3), kind, &init, &IntegratorSettings::new(step, steps))
}

// ---- criteria ----

fn frobenius_classification() -> CriterionResult {
    let mut c = CriterionResult::new(1, "Frobenius classification");
    let e3 = euclid(3);
    let cube = GridSpec::new(vec![0.0; 3], 1.0, 5).expect("grid");
    // the sphere field is singular at the origin
    let shell = GridSpec::new(vec![0.0, 0.0, 3.0], 1.0, 5).expect("grid");
    let integrable = [
        ("exact_sphere", field(3, CatalogForm::ExactSphere), &shell),
        ("linear", field(3, CatalogForm::Linear), &cube),
        ("integrating_factor", field(3, CatalogForm::default_integrating_factor(3)), &cube),
    ];
    for (name, f, grid) in &integrable {
        let mut worst = 0.0_f64;
        let mut count = 0;
        for x in grid.points() {
            match differential_split(f, &e3, &x, DiffMode::Analytic).and_then(|g| frobenius_three_form(&g)) {
                Ok(t) => worst = worst.max(t.max_abs()),
                Err(e) => c.fail(format!("{name} at {x:?}: {e}")),
            }
            count += 1;
        }
        c.check(format!("{name}_points"), count as f64, count == 125);
        c.below(format!("{name}_max_n_wedge_dn"), worst, 1e-10);
    }
    // N∧dN of the raw form dz − y dx is dx∧dy∧dz; the unit form carries 1/|N|²
    let contact = field(3, CatalogForm::Contact);
    let mut worst = 0.0_f64;
    for x in cube.points() {
        match differential_split(&contact, &e3, &x, DiffMode::Analytic) {
            Ok(g) => {
                let t = frobenius_three_form(&g).expect("dimension 3");
                let raw = t.components()[0] * g.raw_norm * g.raw_norm;
                worst = worst.max((raw - 1.0).abs());
            }
            Err(e) => c.fail(format!("contact at {x:?}: {e}")),
        }
    }
    c.below("contact_component_error", worst, 1e-10);
    c
}

fn sphere_curvature() -> CriterionResult {
    let mut c = CriterionResult::new(2, "sphere curvature oracle");
    let f = field(3, CatalogForm::ExactSphere);
    let e3 = euclid(3);
    let (mut an, mut fd, mut div) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut umbilic = true;
    for x in sphere_points(2.0) {
        for (mode, worst) in [(DiffMode::Analytic, &mut an), (DiffMode::FiniteDiff, &mut fd)] {
            match analyze_point(&f, &e3, &x, mode, DEFAULT_EIGEN_ZERO) {
                Ok(p) => {
                    for k in &p.report.principal_curvatures {
                        *worst = worst.max((k - 0.5).abs());
                    }
                    if mode == DiffMode::Analytic {
                        umbilic &= p.report.classification == PointClass::Umbilic;
                        match fd_divergence(&f, &e3, &x) {
                            Ok(d) => div = div.max((2.0 * p.report.mean_curvature - d).abs()),
                            Err(e) => c.fail(e.to_string()),
                        }
                    }
                }
                Err(e) => c.fail(e.to_string()),
            }
        }
    }
    c.below("analytic_kappa_error", an, 1e-8);
    c.below("finite_difference_kappa_error", fd, 1e-5);
    c.below("divergence_identity_error", div, 1e-6);
    c.check("umbilic", f64::from(u8::from(umbilic)), umbilic);
    c
}

fn minimal_harmonic() -> CriterionResult {
    let mut c = CriterionResult::new(3, "minimal iff harmonic");
    let e3 = euclid(3);
    let linear = field(3, CatalogForm::Linear);
    let mut worst = 0.0_f64;
    for x in [[0.3, 0.4, 0.5], [-1.0, 2.0, 0.1], [5.0, -3.0, 2.0]] {
        match analyze_point(&linear, &e3, &x, DiffMode::Analytic, DEFAULT_EIGEN_ZERO) {
            Ok(p) => worst = worst.max(p.report.mean_curvature.abs()),
            Err(e) => c.fail(e.to_string()),
        }
    }
    c.below("linear_mean_curvature", worst, 1e-10);
    let sphere = field(3, CatalogForm::ExactSphere);
    let mut worst = 0.0_f64;
    for x in sphere_points(2.0) {
        match analyze_point(&sphere, &e3, &x, DiffMode::Analytic, DEFAULT_EIGEN_ZERO) {
            Ok(p) => worst = worst.max((p.report.mean_curvature - 0.5).abs()),
            Err(e) => c.fail(e.to_string()),
        }
    }
    c.below("sphere_mean_curvature_error", worst, 1e-6);
    c
}

fn geodesic_normal_curve() -> CriterionResult {
    let mut c = CriterionResult::new(4, "geodesic equals normal curve when integrable");
    match (sphere_run(CurveKind::NormalCurve, 1e-3, 1571), sphere_run(CurveKind::Geodesic, 1e-3, 1571)) {
        (Ok(a), Ok(b)) => match trajectory_compare(&a, &b) {
            Ok(cmp) => c.below("quarter_circle_max_distance", cmp.max_pointwise_distance, 1e-6),
            Err(e) => c.fail(e.to_string()),
        },
        (Err(e), _) | (_, Err(e)) => c.fail(e.to_string()),
    }
    // 3142 steps landing exactly on s = π
    match sphere_run(CurveKind::Geodesic, PI / 3142.0, 3142) {
        Ok(t) => c.below("half_circle_endpoint_error", dist(&t.last().x, &[-1.0, 0.0, 0.0]), 1e-5),
        Err(e) => c.fail(e.to_string()),
    }
    c
}

fn scenario_config(name: &str) -> crate::config::ScenarioConfig {
    let text = crate::scenarios::find(name).expect("shipped scenario");
    parse_config(text).expect("shipped scenario parses")
}

fn contact_non_normality() -> CriterionResult {
    let mut c = CriterionResult::new(5, "contact geodesic is not a normal curve");
    let cfg = scenario_config("contact_geodesic.json");
    match integrate_scenario(&cfg, Some(false)) {
        Ok(run) => {
            let f = field(3, CatalogForm::Contact);
            let rep = normality_check(&f, &euclid(3), &run.trajectory, cfg.tolerances.normality);
            c.check("max_varpi_residual", rep.max_varpi_residual, rep.max_varpi_residual > 0.1);
            c.below("max_drift", run.trajectory.max_drift(), 1e-7);
            c.check("complete", 1.0, run.trajectory.is_complete());
        }
        Err(e) => c.fail(e.to_string()),
    }
    c
}

fn constraint_preservation() -> CriterionResult {
    let mut c = CriterionResult::new(6, "constraint preservation on shipped scenarios");
    let mut count = 0;
    for (name, text) in SCENARIOS {
        let cfg = match parse_config(text) {
            Ok(cfg) => cfg,
            Err(e) => {
                c.fail(format!("{name}: {e}"));
                continue;
            }
        };
        let Some(ic) = cfg.integrate.as_ref().filter(|_| cfg.task == Task::Integrate) else { continue };
        if !ic.kind.is_pfaffian() {
            continue;
        }
        if ic.steps > 10_000 || ic.step > 1e-3 {
            c.fail(format!("{name}: exceeds 1e4 steps of 1e-3"));
        }
        let stem = name.trim_end_matches(".json");
        for (projection, bound, tag) in [(false, 1e-7, "free"), (true, 1e-12, "projected")] {
            match integrate_scenario(&cfg, Some(projection)) {
                Ok(run) => {
                    if let Some(e) = &run.trajectory.termination {
                        c.fail(format!("{name} ({tag}): {e}"));
                    }
                    c.below(format!("{stem}_{tag}_drift"), run.trajectory.max_drift(), bound);
                }
                Err(e) => c.fail(format!("{name} ({tag}): {e}")),
            }
        }
        count += 1;
    }
    c.check("scenarios", count as f64, count > 0);
    c
}

fn lorentz_equivalence() -> CriterionResult {
    let mut c = CriterionResult::new(7, "Lorentz equivalence of bundle geodesics");
    let cfg = scenario_config("cyclotron_em_geodesic.json");
    let (pot, ic) = match (&cfg.form, &cfg.integrate) {
        (crate::config::FormConfig::Em(p), Some(ic)) => (p.clone(), ic.clone()),
        _ => {
            c.fail("cyclotron scenario is not electromagnetic");
            return c;
        }
    };
    let settings = IntegratorSettings::new(ic.step, ic.steps);
    let (lor, geo) = match (lorentz_integrate(&pot, &ic.x0, &ic.v0, &settings), constrained_geodesic_em(&pot, &ic.x0, &ic.v0, &settings)) {
        (Ok(l), Ok(g)) => (l, g),
        (Err(e), _) | (_, Err(e)) => {
            c.fail(e.to_string());
            return c;
        }
    };
    c.check("steps", lor.len() as f64 - 1.0, lor.is_complete() && geo.is_complete() && ic.steps == 10_000);
    match trajectory_compare(&lor, &geo) {
        Ok(cmp) => c.below("max_4d_deviation", cmp.max_pointwise_distance, 1e-8),
        Err(e) => c.fail(e.to_string()),
    }
    c.check("lambda", geo.states[0].lambda, geo.states[0].lambda == -pot.q / (pot.m * pot.c));
    // orbit radius from the extent of the (x, y) projection
    let b = match pot.kind {
        PotentialKind::UniformB { b } => b,
        _ => f64::NAN,
    };
    let (xs, ys): (Vec<f64>, Vec<f64>) = lor.states.iter().map(|s| (s.x[1], s.x[2])).unzip();
    let mid = |v: &[f64]| {
        (v.iter().copied().fold(f64::INFINITY, f64::min) + v.iter().copied().fold(f64::NEG_INFINITY, f64::max)) / 2.0
    };
    let (cx, cy) = (mid(&xs), mid(&ys));
    let radius = xs.iter().zip(&ys).map(|(x, y)| ((x - cx).powi(2) + (y - cy).powi(2)).sqrt()).sum::<f64>() / xs.len() as f64;
    // γ m v⊥ / (qB) with the proper-time velocity γv⊥ taken from the start
    let v_perp = (ic.v0[1] * ic.v0[1] + ic.v0[2] * ic.v0[2]).sqrt();
    let expected = pot.m * v_perp / (pot.q * b).abs();
    c.below("radius_relative_error", (radius - expected).abs() / expected, 1e-3);
    c.below("mass_shell_drift", lor.max_drift(), 1e-9);
    c
}

fn em_degrees() -> CriterionResult {
    let mut c = CriterionResult::new(8, "electromagnetic integrability degrees");
    let grid = GridSpec::new(vec![0.0; 4], 0.5, 3).expect("grid");
    let gauge = Polynomial::new(4, vec![Monomial::new(1.0, vec![1, 0, 0, 0]), Monomial::new(0.5, vec![0, 2, 1, 0])])
        .expect("gauge polynomial");
    let cases = [
        (FourPotentialSpec::new(PotentialKind::PureGauge { phi: gauge }), 4),
        (FourPotentialSpec::new(PotentialKind::UniformB { b: 1.0 }), 3),
        (FourPotentialSpec::new(PotentialKind::CrossedEB { e: 1.0, b: 1.0 }), 2),
    ];
    for (pot, want) in cases {
        match em_integrability_report(&pot, &grid, 1e-9) {
            Ok(r) => {
                c.check(format!("{}_degree", pot.name()), r.degree as f64, r.degree == want);
                c.check(format!("{}_agrees_with_pfaff", pot.name()), f64::from(u8::from(r.agrees_with_pfaff)), r.agrees_with_pfaff);
            }
            Err(e) => c.fail(format!("{}: {e}", pot.name())),
        }
    }
    c
}

fn numerics_hygiene() -> CriterionResult {
    let mut c = CriterionResult::new(9, "numerics hygiene");
    let uniform_b = FourPotentialSpec::new(PotentialKind::CrossedEB { e: 1.0, b: 1.0 });
    let bundle = build_bundle_form(&uniform_b).and_then(|s| s.compile()).expect("bundle form");
    let forms = [
        ("exact_sphere", field(3, CatalogForm::ExactSphere), euclid(3)),
        ("linear", field(4, CatalogForm::Linear), euclid(4)),
        ("integrating_factor", field(3, CatalogForm::default_integrating_factor(3)), euclid(3)),
        ("contact", field(3, CatalogForm::Contact), euclid(3)),
        ("darboux_k", field(5, CatalogForm::Darboux { k: 2 }), euclid(5)),
        ("em", bundle, MetricSpec::bundle5()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for (name, f, m) in &forms {
        let mut worst = 0.0_f64;
        let mut n = 0;
        while n < 100 {
            let x: Vec<f64> = (0..f.dim()).map(|_| rng.gen_range(-2.0..2.0)).collect();
            if x.iter().map(|v| v * v).sum::<f64>() <= 0.25 {
                continue;
            }
            let pair = differential_split(f, m, &x, DiffMode::Analytic)
                .and_then(|a| differential_split(f, m, &x, DiffMode::FiniteDiff).map(|d| (a, d)));
            match pair {
                Ok((a, d)) => {
                    for (ja, jd) in a.jacobian.as_slice().iter().zip(d.jacobian.as_slice()) {
                        worst = worst.max((ja - jd).abs() / ja.abs().max(1.0));
                    }
                    n += 1;
                }
                // null normals of the indefinite bundle metric are skipped
                Err(pseudohyp_core::Error::NullNormal { .. }) => {}
                Err(e) => {
                    c.fail(format!("{name}: {e}"));
                    n += 1;
                }
            }
        }
        c.below(format!("{name}_jacobian_error"), worst, 1e-6);
    }
    let endpoint_error = |h: f64, steps: usize| {
        sphere_run(CurveKind::NormalCurve, h, steps).map(|t| {
            let s = h * steps as f64;
            dist(&t.last().x, &[s.cos(), s.sin(), 0.0])
        })
    };
    match (endpoint_error(0.1, 16), endpoint_error(0.05, 32)) {
        (Ok(a), Ok(b)) => {
            let ratio = a / b;
            c.check("rk4_halving_ratio", ratio, (12.0..=20.0).contains(&ratio));
        }
        (Err(e), _) | (_, Err(e)) => c.fail(e.to_string()),
    }
    c
}

fn determinism() -> CriterionResult {
    let mut c = CriterionResult::new(10, "determinism");
    let run = || to_json(&SuiteReport::new(CHECKS.iter().map(|f| f()).collect()));
    let (a, b) = (run(), run());
    c.check("report_bytes", a.len() as f64, a == b);
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_are_one_per_criterion() {
        let mut r = CriterionResult::new(3, "x");
        r.below("a", 1.0, 2.0);
        assert!(r.line().starts_with("criterion  3 PASS x: a=1.000e0"));
        r.below("b", 3.0, 2.0);
        assert!(!r.passed);
        let s = SuiteReport::new(vec![r]);
        assert_eq!(s.failed(), [3]);
        assert_eq!(s.lines().len(), 2);
    }

    #[test]
    fn unknown_criterion() {
        assert!(run_criterion(0).is_none());
        assert!(run_criterion(11).is_none());
    }
}
