use proptest::prelude::*;
use pseudohyp_core::forms::{
    differential_split, CatalogForm, CovectorField, CovectorFieldSpec, DiffMode, MetricSpec, PointGeometry,
};
use pseudohyp_core::geometry::{
    adapted_frame, adapted_frame_with, analyze_point, curvature_report, omega_decompose,
    second_fundamental_restricted, tangent_projectors, PivotOrder, PointClass, DEFAULT_EIGEN_ZERO,
};
use pseudohyp_core::SquareMatrix;

fn compiled(dim: usize, form: CatalogForm) -> CovectorField {
    CovectorFieldSpec::catalog(dim, form).compile().unwrap()
}

fn catalog() -> Vec<CovectorField> {
    vec![
        compiled(3, CatalogForm::ExactSphere),
        compiled(3, CatalogForm::Linear),
        compiled(3, CatalogForm::default_integrating_factor(3)),
        compiled(3, CatalogForm::Contact),
        compiled(5, CatalogForm::Darboux { k: 2 }),
        compiled(4, CatalogForm::Darboux { k: 1 }),
    ]
}

fn split(f: &CovectorField, x: &[f64]) -> PointGeometry {
    differential_split(f, &MetricSpec::euclidean(f.dim()).unwrap(), x, DiffMode::Analytic).unwrap()
}

/// Determinant by partial-pivot elimination.
fn det(m: &SquareMatrix) -> f64 {
    let n = m.dim();
    let mut a = m.rows();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        let pivot = a[c].clone();
        for row in a.iter_mut().skip(c + 1) {
            let f = row[c] / pivot[c];
            for (x, p) in row.iter_mut().zip(&pivot).skip(c) {
                *x -= f * p;
            }
        }
    }
    d
}

/// Divergence `∂_i Nⁱ` of the unit field by central differences.
fn divergence(f: &CovectorField, x: &[f64]) -> f64 {
    let h = 1e-5;
    let m = MetricSpec::euclidean(f.dim()).unwrap();
    (0..x.len())
        .map(|i| {
            let mut p = x.to_vec();
            p[i] += h;
            let up = differential_split(f, &m, &p, DiffMode::Analytic).unwrap().n_vec[i];
            p[i] -= 2.0 * h;
            let dn = differential_split(f, &m, &p, DiffMode::Analytic).unwrap().n_vec[i];
            (up - dn) / (2.0 * h)
        })
        .sum()
}

#[test]
fn sphere_oracle_in_both_modes() {
    let sphere = compiled(3, CatalogForm::ExactSphere);
    let e3 = MetricSpec::euclidean(3).unwrap();
    for (mode, tol) in [(DiffMode::Analytic, 1e-8), (DiffMode::FiniteDiff, 1e-5)] {
        for x in [[0.0, 0.0, 2.0], [2.0, 0.0, 0.0], [1.2, -1.2, 0.7]] {
            let r2: f64 = x.iter().map(|c| c * c).sum();
            let scale = 2.0 / r2.sqrt();
            let x: Vec<f64> = x.iter().map(|c| c * scale).collect();
            let pc = analyze_point(&sphere, &e3, &x, mode, DEFAULT_EIGEN_ZERO).unwrap();
            for k in &pc.report.principal_curvatures {
                assert!((k - 0.5).abs() < tol, "{k}");
            }
            if mode == DiffMode::Analytic {
                assert_eq!(pc.report.classification, PointClass::Umbilic);
            }
            assert!((2.0 * pc.report.mean_curvature - divergence(&sphere, &x)).abs() < 1e-6);
        }
    }
}

#[test]
fn minimal_iff_harmonic() {
    let e3 = MetricSpec::euclidean(3).unwrap();
    let linear = analyze_point(&compiled(3, CatalogForm::Linear), &e3, &[0.3, 0.4, 0.5], DiffMode::Analytic, 1e-8).unwrap();
    assert!(linear.report.mean_curvature.abs() < 1e-10);
    assert_eq!(linear.report.classification, PointClass::Flat);
    let sphere = analyze_point(&compiled(3, CatalogForm::ExactSphere), &e3, &[0.0, 2.0, 0.0], DiffMode::Analytic, 1e-8).unwrap();
    assert!((sphere.report.mean_curvature - 0.5).abs() < 1e-6);
}

#[test]
fn integrable_catalog_satisfies_the_divergence_identity() {
    let forms = [
        compiled(3, CatalogForm::ExactSphere),
        compiled(3, CatalogForm::Linear),
        compiled(3, CatalogForm::default_integrating_factor(3)),
        compiled(4, CatalogForm::ExactSphere),
    ];
    for f in &forms {
        for x in [[0.5, 1.0, -0.7, 0.9], [1.5, -0.2, 0.3, -1.1]] {
            let x = &x[..f.dim()];
            let m = MetricSpec::euclidean(f.dim()).unwrap();
            let pc = analyze_point(f, &m, x, DiffMode::Analytic, 1e-8).unwrap();
            let n = (f.dim() - 1) as f64;
            assert!((n * pc.report.mean_curvature - divergence(f, x)).abs() < 1e-6);
        }
    }
}

#[test]
fn minkowski_frame_has_mixed_signs() {
    // N = dx under η: Σ = span{∂_t, ∂_y, ∂_z}
    let f = CovectorFieldSpec::polynomial(vec![
        pseudohyp_core::poly::Polynomial::zero(4),
        pseudohyp_core::poly::Polynomial::constant(4, 1.0),
        pseudohyp_core::poly::Polynomial::zero(4),
        pseudohyp_core::poly::Polynomial::zero(4),
    ])
    .compile()
    .unwrap();
    let eta = MetricSpec::minkowski();
    let g = differential_split(&f, &eta, &[0.0; 4], DiffMode::Analytic).unwrap();
    assert_eq!(g.signature, -1.0);
    let p = tangent_projectors(&g);
    assert!(p.normal.matmul(&p.normal).sub(&p.normal).max_abs() < 1e-15);
    let frame = adapted_frame(&g, &eta).unwrap();
    let mut signs = frame.signs.clone();
    signs.sort_by(f64::total_cmp);
    assert_eq!(signs, [-1.0, -1.0, 1.0]);
    let rep = curvature_report(&second_fundamental_restricted(&g, &frame), &frame.restricted_metric(), 1e-8).unwrap();
    assert_eq!(rep.classification, PointClass::IndefiniteMetric);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn projector_algebra(idx in 0usize..6, seed in prop::collection::vec(-2.0..2.0f64, 5)) {
        let f = &catalog()[idx];
        let x: Vec<f64> = seed[..f.dim()].iter().map(|c| c + 0.6).collect();
        let g = split(f, &x);
        let p = tangent_projectors(&g);
        let id = SquareMatrix::identity(f.dim());
        prop_assert!(p.tangent.matmul(&p.tangent).sub(&p.tangent).max_abs() < 1e-12);
        prop_assert!(p.normal.matmul(&p.normal).sub(&p.normal).max_abs() < 1e-12);
        prop_assert!(p.tangent.matmul(&p.normal).max_abs() < 1e-12);
        let sum = SquareMatrix::from_fn(f.dim(), |i, j| p.tangent[(i, j)] + p.normal[(i, j)]);
        prop_assert!(sum.sub(&id).max_abs() < 1e-12);
        prop_assert!((p.tangent.trace() - (f.dim() - 1) as f64).abs() < 1e-12);
    }

    #[test]
    fn frame_invariants(idx in 0usize..6, seed in prop::collection::vec(-2.0..2.0f64, 5)) {
        let f = &catalog()[idx];
        let x: Vec<f64> = seed[..f.dim()].iter().map(|c| c + 0.6).collect();
        let g = split(f, &x);
        let m = MetricSpec::euclidean(f.dim()).unwrap();
        for order in [PivotOrder::LargestResidual, PivotOrder::Reversed] {
            let fr = adapted_frame_with(&g, &m, order).unwrap();
            prop_assert_eq!(fr.rank(), f.dim() - 1);
            for a in 0..fr.rank() {
                prop_assert!(g.constraint(&fr.tangent_basis[a]).abs() < 1e-12);
                for b in 0..fr.rank() {
                    let want = if a == b { fr.signs[a] } else { 0.0 };
                    prop_assert!((m.inner(&fr.tangent_basis[a], &fr.tangent_basis[b]) - want).abs() < 1e-12);
                    let dual: f64 = fr.coframe[a].iter().zip(&fr.tangent_basis[b]).map(|(p, q)| p * q).sum();
                    let delta = if a == b { 1.0 } else { 0.0 };
                    prop_assert!((dual - delta).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn spectrum_invariants_and_frame_independence(idx in 0usize..6, seed in prop::collection::vec(-2.0..2.0f64, 5)) {
        let f = &catalog()[idx];
        let x: Vec<f64> = seed[..f.dim()].iter().map(|c| c + 0.6).collect();
        let g = split(f, &x);
        let m = MetricSpec::euclidean(f.dim()).unwrap();
        let mut spectra = Vec::new();
        for order in [PivotOrder::LargestResidual, PivotOrder::Reversed] {
            let fr = adapted_frame_with(&g, &m, order).unwrap();
            let hbar = second_fundamental_restricted(&g, &fr);
            let rep = curvature_report(&hbar, &fr.restricted_metric(), DEFAULT_EIGEN_ZERO).unwrap();
            let sum: f64 = rep.principal_curvatures.iter().sum();
            let det = det(&hbar);
            prop_assert!((hbar.trace() - sum).abs() < 1e-10);
            prop_assert!((det - rep.gaussian_curvature).abs() < 1e-10);
            prop_assert!((rep.mean_curvature * fr.rank() as f64 - sum).abs() < 1e-10);
            spectra.push(rep.principal_curvatures);
        }
        for (a, b) in spectra[0].iter().zip(&spectra[1]) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn omega_reconstructs_w(
        u in prop::collection::vec(-1.0..1.0f64, 5),
        v in prop::collection::vec(-1.0..1.0f64, 5),
        x in prop::collection::vec(-1.0..1.0f64, 5),
    ) {
        let f = compiled(5, CatalogForm::Darboux { k: 2 });
        let m = MetricSpec::euclidean(5).unwrap();
        let g = split(&f, &x);
        let fr = adapted_frame(&g, &m).unwrap();
        let om = omega_decompose(&g, &fr);
        let (ut, vt) = (fr.to_frame(&u), fr.to_frame(&v));
        let eta = |t: &[f64]| -> f64 { om.eta.iter().zip(t).map(|(e, c)| e * c).sum() };
        let rebuilt = om.varpi.bilinear(&ut, &vt) + eta(&ut) * g.constraint(&v) - eta(&vt) * g.constraint(&u);
        prop_assert!((rebuilt - g.w.bilinear(&u, &v)).abs() < 1e-9);
    }
}

#[test]
fn omega_reconstructs_w_under_minkowski() {
    // N = dt + x dy is timelike near the origin
    use pseudohyp_core::poly::Polynomial;
    let f = CovectorFieldSpec::polynomial(vec![
        Polynomial::constant(4, 1.0),
        Polynomial::zero(4),
        Polynomial::linear(4, 1, 1.0),
        Polynomial::zero(4),
    ])
    .compile()
    .unwrap();
    let eta_m = MetricSpec::minkowski();
    let g = differential_split(&f, &eta_m, &[0.1, 0.3, -0.2, 0.5], DiffMode::Analytic).unwrap();
    let fr = adapted_frame(&g, &eta_m).unwrap();
    let om = omega_decompose(&g, &fr);
    let (u, v) = ([0.3, -1.0, 0.25, 0.7], [-0.4, 0.2, 0.9, -0.1]);
    let (ut, vt) = (fr.to_frame(&u), fr.to_frame(&v));
    let e = |t: &[f64]| -> f64 { om.eta.iter().zip(t).map(|(a, b)| a * b).sum() };
    let rebuilt = om.varpi.bilinear(&ut, &vt) + e(&ut) * g.constraint(&v) - e(&vt) * g.constraint(&u);
    assert!((rebuilt - g.w.bilinear(&u, &v)).abs() < 1e-12);
}
