use std::f64::consts::PI;

use pseudohyp_core::curves::{
    constrained_geodesic_rhs, integrate, kinematics_decompose, line_of_curvature_integrate, normality_check,
    CurveKind, InitialState, IntegratorSettings, Trajectory, TrajectoryState,
};
use pseudohyp_core::em::trajectory_compare;
use pseudohyp_core::forms::{differential_split, CatalogForm, CovectorField, CovectorFieldSpec, DiffMode, MetricSpec};
use pseudohyp_core::geometry::{adapted_frame, omega_decompose, second_fundamental_restricted, varpi_kernel};
use pseudohyp_core::poly::{Monomial, Polynomial};
use pseudohyp_core::Error;

fn field(dim: usize, form: CatalogForm) -> CovectorField {
    CovectorFieldSpec::catalog(dim, form).compile().unwrap()
}

fn e3() -> MetricSpec {
    MetricSpec::euclidean(3).unwrap()
}

fn sphere_run(kind: CurveKind, step: f64, steps: usize) -> Trajectory {
    let init = InitialState::new(vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]);
    integrate(&field(3, CatalogForm::ExactSphere), &e3(), kind, &init, &IntegratorSettings::new(step, steps)).unwrap()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn unit_tangent(geom_n: &[f64], raw: &[f64]) -> Vec<f64> {
    let c: f64 = geom_n.iter().zip(raw).map(|(a, b)| a * b).sum::<f64>() / geom_n.iter().map(|a| a * a).sum::<f64>();
    let t: Vec<f64> = raw.iter().zip(geom_n).map(|(r, n)| r - c * n).collect();
    let len = t.iter().map(|a| a * a).sum::<f64>().sqrt();
    t.iter().map(|a| a / len).collect()
}

#[test]
fn half_great_circle_reaches_antipode() {
    // 3142 steps landing exactly on s = π
    let t = sphere_run(CurveKind::NormalCurve, PI / 3142.0, 3142);
    assert!(t.is_complete());
    assert!(dist(&t.last().x, &[-1.0, 0.0, 0.0]) < 1e-5);
    for s in &t.states {
        let oracle = [s.s.cos(), s.s.sin(), 0.0];
        assert!(dist(&s.x, &oracle) < 1e-9);
    }
}

#[test]
fn fixed_step_of_one_milli_overshoots_by_the_parameter_gap() {
    // 3142 · 1e−3 passes π by 4.07e−4, which is the whole endpoint error
    let t = sphere_run(CurveKind::NormalCurve, 1e-3, 3142);
    let d = dist(&t.last().x, &[-1.0, 0.0, 0.0]);
    assert!((d - (3142.0 * 1e-3 - PI)).abs() < 1e-6, "{d}");
}

#[test]
fn sphere_geodesic_equals_normal_curve() {
    let a = sphere_run(CurveKind::NormalCurve, 1e-3, 1571);
    let b = sphere_run(CurveKind::Geodesic, 1e-3, 1571);
    let c = trajectory_compare(&a, &b).unwrap();
    assert!(c.max_pointwise_distance < 1e-6, "{c:?}");
}

#[test]
fn integrable_closure_records_h_of_v() {
    let t = sphere_run(CurveKind::Geodesic, 1e-2, 200);
    let f = field(3, CatalogForm::ExactSphere);
    for s in &t.states {
        let g = differential_split(&f, &e3(), &s.x, DiffMode::Analytic).unwrap();
        let (_, dl) = constrained_geodesic_rhs(&f, &e3(), &s.x, &s.v, s.lambda).unwrap();
        assert!((dl - g.h.bilinear(&s.v, &s.v)).abs() < 1e-9);
    }
}

#[test]
fn rk4_is_fourth_order_on_the_great_circle() {
    let endpoint_error = |h: f64, n: usize| {
        let t = sphere_run(CurveKind::NormalCurve, h, n);
        let s = h * n as f64;
        dist(&t.last().x, &[s.cos(), s.sin(), 0.0])
    };
    let coarse = endpoint_error(0.1, 16);
    let fine = endpoint_error(0.05, 32);
    let ratio = coarse / fine;
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
}

fn contact_geodesic(projection: bool) -> Trajectory {
    let f = field(3, CatalogForm::Contact);
    let x0 = vec![0.3, -0.2, 0.1];
    let v0 = unit_tangent(&[0.2, 0.0, 1.0], &[1.0, 0.5, 0.0]);
    let init = InitialState::new(x0, v0);
    integrate(&f, &e3(), CurveKind::Geodesic, &init, &IntegratorSettings::new(1e-3, 10_000).with_projection(projection))
        .unwrap()
}

#[test]
fn contact_geodesic_keeps_the_constraint() {
    let t = contact_geodesic(false);
    assert!(t.is_complete());
    assert!(t.max_drift() < 1e-7, "drift {}", t.max_drift());
    assert!(t.max_speed_deviation() < 1e-6, "speed {}", t.max_speed_deviation());
    let p = contact_geodesic(true);
    assert!(p.max_drift() < 1e-12, "projected drift {}", p.max_drift());
}

#[test]
fn contact_geodesic_is_not_a_normal_curve() {
    let t = contact_geodesic(false);
    let rep = normality_check(&field(3, CatalogForm::Contact), &e3(), &t, 1e-6);
    assert!(!rep.all_normal);
    assert!(rep.max_varpi_residual > 0.1);
    assert!(rep.samples.iter().all(|s| !s.normal));
}

#[test]
fn sphere_geodesic_is_normal() {
    let t = sphere_run(CurveKind::Geodesic, 1e-3, 1000);
    let rep = normality_check(&field(3, CatalogForm::ExactSphere), &e3(), &t, 1e-6);
    assert!(rep.all_normal, "{}", rep.max_varpi_residual);
}

#[test]
fn darboux_kernel_direction_passes_at_start() {
    // ϖ of darboux_1 in dim 5 has rank 2 on the 4-dimensional Σ
    let f = field(5, CatalogForm::Darboux { k: 1 });
    let m = MetricSpec::euclidean(5).unwrap();
    let x0 = vec![0.1, 0.2, -0.3, 0.4, 0.5];
    let g = differential_split(&f, &m, &x0, DiffMode::Analytic).unwrap();
    let frame = adapted_frame(&g, &m).unwrap();
    let om = omega_decompose(&g, &frame);
    let ker = varpi_kernel(&om, 1e-12);
    assert_eq!(ker.len(), 2);
    let v0 = frame.to_ambient(&ker[0]);
    let t = integrate(&f, &m, CurveKind::Geodesic, &InitialState::new(x0, v0), &IntegratorSettings::new(1e-3, 20)).unwrap();
    let rep = normality_check(&f, &m, &t, 1e-6);
    assert!(rep.samples[0].normal, "{:?}", rep.samples[0]);

    // darboux_2 in dim 6 likewise leaves a kernel on Σ
    let f = field(6, CatalogForm::Darboux { k: 2 });
    let m = MetricSpec::euclidean(6).unwrap();
    let g = differential_split(&f, &m, &[0.1, 0.2, -0.3, 0.4, 0.5, 0.6], DiffMode::Analytic).unwrap();
    let frame = adapted_frame(&g, &m).unwrap();
    assert_eq!(varpi_kernel(&omega_decompose(&g, &frame), 1e-12).len(), 1);
}

#[test]
fn darboux_two_in_dim_five_has_trivial_kernel() {
    let f = field(5, CatalogForm::Darboux { k: 2 });
    let m = MetricSpec::euclidean(5).unwrap();
    let g = differential_split(&f, &m, &[0.1, 0.2, -0.3, 0.4, 0.5], DiffMode::Analytic).unwrap();
    let frame = adapted_frame(&g, &m).unwrap();
    assert!(varpi_kernel(&omega_decompose(&g, &frame), 1e-12).is_empty());
}

fn synthetic(xs: impl Fn(f64) -> (Vec<f64>, Vec<f64>), h: f64, n: usize) -> Trajectory {
    let states = (0..n)
        .map(|k| {
            let s = k as f64 * h;
            let (x, v) = xs(s);
            let speed = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            TrajectoryState { s, x, v, lambda: 0.0, drift: 0.0, speed }
        })
        .collect();
    Trajectory { kind: "synthetic".into(), method: "rk4", step: h, requested_steps: n - 1, states, termination: None }
}

#[test]
fn uniform_circular_motion() {
    let (r, w) = (2.0, 3.0);
    let t = synthetic(
        |s| (vec![r * (w * s).cos(), r * (w * s).sin(), 0.0], vec![-r * w * (w * s).sin(), r * w * (w * s).cos(), 0.0]),
        1e-4,
        50,
    );
    let k = kinematics_decompose(&t, 1e-8).unwrap();
    for sample in &k {
        assert!((sample.speed - 6.0).abs() < 1e-12);
        assert!(sample.vdot.abs() < 1e-3);
        assert!((sample.kappa - 0.5).abs() < 1e-6);
        assert!((sample.a_centripetal + 18.0).abs() < 1e-3);
        assert!(sample.residual < 1e-3);
    }
    assert!(k[10].vdot.abs() < 1e-6);
}

#[test]
fn straight_line_is_degenerate() {
    let t = synthetic(|s| (vec![1.0 + s, 2.0 - 2.0 * s, 0.5 * s], vec![1.0, -2.0, 0.5]), 0.1, 10);
    let k = kinematics_decompose(&t, 1e-8).unwrap();
    assert!(k.iter().all(|s| s.kappa < 1e-12 && s.is_degenerate()));
    assert_eq!(k[3].principal_normal().unwrap_err(), Error::DegenerateCurve);
}

#[test]
fn great_circle_curvature_and_normal_curvature() {
    let t = sphere_run(CurveKind::NormalCurve, 1e-3, 500);
    let k = kinematics_decompose(&t, 1e-8).unwrap();
    let f = field(3, CatalogForm::ExactSphere);
    for (sample, st) in k.iter().zip(&t.states) {
        assert!((sample.kappa - 1.0).abs() < 1e-4);
        // normal component of the curvature vector against −H̄(t, t)
        let g = differential_split(&f, &e3(), &st.x, DiffMode::Analytic).unwrap();
        let frame = adapted_frame(&g, &e3()).unwrap();
        let hbar = second_fundamental_restricted(&g, &frame);
        let tf = frame.to_frame(&sample.tangent);
        let kn = -hbar.bilinear(&tf, &tf);
        let kvec_n: f64 = sample.acceleration.iter().zip(&g.n_vec).map(|(a, n)| a * n).sum::<f64>() / (sample.speed * sample.speed);
        assert!((kvec_n - kn).abs() < 1e-4, "{kvec_n} vs {kn}");
    }
}

#[test]
fn line_of_curvature_stops_at_umbilic() {
    let err = line_of_curvature_integrate(
        &field(3, CatalogForm::ExactSphere),
        &e3(),
        &[0.0, 0.0, 2.0],
        0,
        &IntegratorSettings::new(1e-2, 10),
        1e-8,
    )
    .unwrap_err();
    assert_eq!(err, Error::EigenvalueCollision { step: 0 });
}

#[test]
fn line_of_curvature_follows_axis_for_diagonal_h() {
    // N = dz + (x²/2 + y²) ... gradient of φ = z + x²/2 + y²: H̄ = diag(1, 2)/|N| at the origin plane
    let poly = |terms: Vec<(f64, [u32; 3])>| {
        Polynomial::new(3, terms.into_iter().map(|(c, e)| Monomial::new(c, e.to_vec())).collect()).unwrap()
    };
    let f = CovectorFieldSpec::polynomial(vec![
        poly(vec![(1.0, [1, 0, 0])]),
        poly(vec![(2.0, [0, 1, 0])]),
        poly(vec![(1.0, [0, 0, 0])]),
    ])
    .compile()
    .unwrap();
    let t = line_of_curvature_integrate(&f, &e3(), &[0.0, 0.0, 0.0], 0, &IntegratorSettings::new(1e-3, 100), 1e-8).unwrap();
    assert!(t.is_complete());
    for s in &t.states {
        assert!(s.x[1].abs() < 1e-14, "{:?}", s.x);
        assert!(s.drift < 1e-12);
    }
    assert!(t.last().x[0].abs() > 0.09);
}

#[test]
fn contact_line_of_curvature_stays_in_sigma() {
    let t = line_of_curvature_integrate(
        &field(3, CatalogForm::Contact),
        &e3(),
        &[0.0, 0.5, 0.0],
        1,
        &IntegratorSettings::new(1e-3, 1000),
        1e-8,
    )
    .unwrap();
    assert!(t.is_complete());
    assert!(t.max_drift() < 1e-7);
    assert!(t.states.iter().all(|s| s.lambda == 0.0));
}
