//! Charged particles as constrained geodesics of a bundle 1-form.
//!
//! A four-potential `A_μ(x)` on Minkowski space defines `Ā = A + dφ` on
//! ℝ⁴ × ℝ with metric `η ⊕ 1`. The field strength is `F = d∧A`, stored as
//! the antisymmetric matrix `F_μν = ∂_μA_ν − ∂_νA_μ`. The integrability
//! sequence of `Ā` reduces to `F` and `F∧F`: `Ā` is exact when `F = 0`
//! (degree 4), has one Darboux pair when `F ≠ 0` but `F∧F = 0` (degree 3),
//! and two pairs otherwise (degree 2).
//!
//! Constrained geodesics of `Ā = 0` with constant multiplier
//! `λ = −q/(mc)` project to solutions of `m ẍ = q i_ẋF`, which is checked
//! against a direct Lorentz-force integrator.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::curves::{self, Dynamics, IntegratorSettings, Trajectory};
use crate::forms::{AltTensor, CovectorFieldSpec, MetricSpec};
use crate::grid::GridSpec;
use crate::linalg::SquareMatrix;
use crate::math;
use crate::pfaff::{self, integrability_class_at_point, vanishing_threshold};
use crate::poly::Polynomial;
use crate::{Error, Result};

/// Relative size below which `ḡ(Ā, Ā)` counts as null.
pub const NULL_TOL: f64 = crate::forms::NULL_TOL;
/// Accepted `|η(v₀, v₀) − c²|` at the start.
pub const MASS_SHELL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    /// Symmetric gauge `A = (0, −By/2, Bx/2, 0)`, so `F_12 = B`.
    UniformB { b: f64 },
    /// `A = (−E x¹, 0, 0, B x²)`, so `F_01 = E` and `F_23 = B`.
    CrossedEB { e: f64, b: f64 },
    /// `A = −dφ`.
    PureGauge { phi: Polynomial },
    /// Arbitrary polynomial components `A_μ(x)`.
    Custom { components: Vec<Polynomial> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourPotentialSpec {
    pub kind: PotentialKind,
    pub q: f64,
    pub m: f64,
    pub c: f64,
}

impl FourPotentialSpec {
    pub fn new(kind: PotentialKind) -> Self {
        Self { kind, q: 1.0, m: 1.0, c: 1.0 }
    }

    pub fn with_charge(mut self, q: f64, m: f64, c: f64) -> Self {
        self.q = q;
        self.m = m;
        self.c = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m.is_finite() && self.m > 0.0) {
            return Err(Error::Config("mass must be positive".into()));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::Config("c must be positive".into()));
        }
        if !self.q.is_finite() {
            return Err(Error::Config("charge must be finite".into()));
        }
        Ok(())
    }

    /// `λ = −q / (m c)`.
    pub fn multiplier(&self) -> f64 {
        -self.q / (self.m * self.c)
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            PotentialKind::UniformB { .. } => "uniform_B",
            PotentialKind::CrossedEB { .. } => "crossed_EB",
            PotentialKind::PureGauge { .. } => "pure_gauge",
            PotentialKind::Custom { .. } => "custom",
        }
    }

    /// The compiled potential.
    pub fn potential(&self) -> Result<Potential> {
        self.validate()?;
        let components = match &self.kind {
            PotentialKind::UniformB { b } => vec![
                Polynomial::zero(4),
                Polynomial::linear(4, 2, -0.5 * b),
                Polynomial::linear(4, 1, 0.5 * b),
                Polynomial::zero(4),
            ],
            PotentialKind::CrossedEB { e, b } => vec![
                Polynomial::linear(4, 1, -e),
                Polynomial::zero(4),
                Polynomial::zero(4),
                Polynomial::linear(4, 2, *b),
            ],
            PotentialKind::PureGauge { phi } => {
                if phi.dim() != 4 {
                    return Err(Error::Config("gauge function must depend on 4 coordinates".into()));
                }
                phi.gradient().iter().map(|g| g.scale(-1.0)).collect()
            }
            PotentialKind::Custom { components } => {
                if components.len() != 4 {
                    return Err(Error::Config(alloc::format!(
                        "potential has {} components, expected 4",
                        components.len()
                    )));
                }
                if components.iter().any(|c| c.dim() != 4) {
                    return Err(Error::Config("potential components must depend on 4 coordinates".into()));
                }
                components.clone()
            }
        };
        Ok(Potential::new(components))
    }
}

/// Polynomial four-potential with its derivative table.
#[derive(Debug, Clone)]
pub struct Potential {
    components: Vec<Polynomial>,
    /// `[μ][ν] = ∂_μ A_ν`.
    jacobian: Vec<Vec<Polynomial>>,
}

impl Potential {
    fn new(components: Vec<Polynomial>) -> Self {
        let jacobian = (0..4).map(|mu| components.iter().map(|a| a.partial(mu)).collect()).collect();
        Self { components, jacobian }
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn eval(&self, x: &[f64]) -> [f64; 4] {
        core::array::from_fn(|mu| self.components[mu].eval(&x[..4]))
    }

    /// `∂_μ A_ν`.
    pub fn jacobian(&self, x: &[f64]) -> SquareMatrix {
        SquareMatrix::from_fn(4, |mu, nu| self.jacobian[mu][nu].eval(&x[..4]))
    }

    /// `F_μν = ∂_μA_ν − ∂_νA_μ`.
    pub fn field_strength(&self, x: &[f64]) -> SquareMatrix {
        let j = self.jacobian(x);
        SquareMatrix::from_fn(4, |mu, nu| j[(mu, nu)] - j[(nu, mu)])
    }
}

/// `Ā = (A_0, A_1, A_2, A_3, 1)` over `(x⁰, x¹, x², x³, φ)`, to be used with
/// the `bundle5` metric. The fiber coordinate is treated as ℝ.
pub fn build_bundle_form(pot: &FourPotentialSpec) -> Result<CovectorFieldSpec> {
    let p = pot.potential()?;
    let mut comps: Vec<Polynomial> = p.components.iter().map(|c| c.extend_vars(1)).collect();
    comps.push(Polynomial::constant(5, 1.0));
    Ok(CovectorFieldSpec::polynomial(comps))
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct WedgeNorms {
    pub f: f64,
    pub a_wedge_f: f64,
    pub f_wedge_f: f64,
    pub dphi_wedge_f_wedge_f: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EmPointReport {
    pub x: Vec<f64>,
    pub field_strength: SquareMatrix,
    pub wedge_norms: WedgeNorms,
    pub degree: usize,
    /// Degree from the generic classifier on the 5-dimensional form, or
    /// `None` where `Ā` could not be normalized.
    pub pfaff_degree: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EmReport {
    pub potential: &'static str,
    pub samples: Vec<EmPointReport>,
    /// Maxima over the samples.
    pub wedge_norms: WedgeNorms,
    pub degree_histogram: BTreeMap<usize, usize>,
    /// Most frequent degree, ties to the smaller.
    pub degree: usize,
    pub gauge_flag: bool,
    pub agrees_with_pfaff: bool,
}

/// Degree and wedge norms of `Ā` at one base point.
pub fn em_point_report(pot: &FourPotentialSpec, x: &[f64], tol: f64) -> Result<EmPointReport> {
    if x.len() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: x.len() });
    }
    let p = pot.potential()?;
    let f = p.field_strength(x);
    let a = p.eval(x);

    let f4 = AltTensor::from_two_form_matrix(&f);
    let a4 = AltTensor::from_covector(&a);
    let ff = f4.wedge(&f4)?;
    let f5 = AltTensor::from_two_form_matrix(&SquareMatrix::from_fn(5, |i, j| if i < 4 && j < 4 { f[(i, j)] } else { 0.0 }));
    let dphi = AltTensor::from_covector(&[0.0, 0.0, 0.0, 0.0, 1.0]);
    let dff = dphi.wedge(&f5.wedge(&f5)?)?;

    let scale = f4.max_abs();
    let degree = if scale < vanishing_threshold(tol, scale, 2) {
        4
    } else if ff.max_abs() < vanishing_threshold(tol, scale, 4) {
        3
    } else {
        2
    };

    let mut x5 = x.to_vec();
    x5.push(0.0);
    let bundle = build_bundle_form(pot)?.compile()?;
    let pfaff_degree = integrability_class_at_point(&bundle, &MetricSpec::bundle5(), &x5, tol)
        .ok()
        .map(|r| r.degree_of_integrability);

    Ok(EmPointReport {
        x: x.to_vec(),
        field_strength: f,
        wedge_norms: WedgeNorms {
            f: f4.frobenius_norm(),
            a_wedge_f: a4.wedge(&f4)?.frobenius_norm(),
            f_wedge_f: ff.frobenius_norm(),
            dphi_wedge_f_wedge_f: dff.frobenius_norm(),
        },
        degree,
        pfaff_degree,
    })
}

/// Degree classification of `Ā` over a grid in the 4-dimensional base.
pub fn em_integrability_report(pot: &FourPotentialSpec, grid: &GridSpec, tol: f64) -> Result<EmReport> {
    if grid.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: grid.dim() });
    }
    grid.validate()?;
    let samples = grid.points().map(|x| em_point_report(pot, &x, tol)).collect::<Result<Vec<_>>>()?;
    Ok(summarize(pot, samples))
}

/// Folds point reports, taken in grid order.
pub fn summarize(pot: &FourPotentialSpec, samples: Vec<EmPointReport>) -> EmReport {
    let mut norms = WedgeNorms::default();
    let mut hist = BTreeMap::new();
    for s in &samples {
        norms.f = norms.f.max(s.wedge_norms.f);
        norms.a_wedge_f = norms.a_wedge_f.max(s.wedge_norms.a_wedge_f);
        norms.f_wedge_f = norms.f_wedge_f.max(s.wedge_norms.f_wedge_f);
        norms.dphi_wedge_f_wedge_f = norms.dphi_wedge_f_wedge_f.max(s.wedge_norms.dphi_wedge_f_wedge_f);
        *hist.entry(s.degree).or_insert(0usize) += 1;
    }
    let degree = hist
        .iter()
        .fold(None, |best: Option<(usize, usize)>, (&d, &c)| match best {
            Some((_, bc)) if bc >= c => best,
            _ => Some((d, c)),
        })
        .map_or(4, |(d, _)| d);
    EmReport {
        potential: pot.name(),
        gauge_flag: samples.iter().all(|s| s.degree == 4),
        agrees_with_pfaff: samples.iter().all(|s| s.pfaff_degree == Some(s.degree)),
        wedge_norms: norms,
        degree_histogram: hist,
        degree,
        samples,
    }
}

/// `ẍ^μ = (q/m) η^{μν} F_νρ ẋ^ρ`.
struct LorentzDynamics {
    pot: Potential,
    eta: MetricSpec,
    q_over_m: f64,
    c: f64,
}

impl Dynamics for LorentzDynamics {
    fn dim(&self) -> usize {
        4
    }

    fn rhs(&self, y: &[f64]) -> Result<Vec<f64>> {
        let (x, v) = (&y[..4], &y[4..8]);
        let f = self.pot.field_strength(x);
        let force = self.eta.raise(&f.mul_vec(v));
        let mut out = v.to_vec();
        out.extend(force.iter().map(|a| self.q_over_m * a));
        out.push(0.0);
        Ok(out)
    }

    fn drift(&self, _x: &[f64], v: &[f64]) -> Result<f64> {
        Ok((self.eta.inner(v, v) - self.c * self.c).abs())
    }

    fn speed(&self, v: &[f64]) -> f64 {
        self.eta.speed(v)
    }
}

fn check_start(pot: &FourPotentialSpec, x0: &[f64], v0: &[f64], settings: &IntegratorSettings) -> Result<Vec<f64>> {
    settings.validate()?;
    pot.validate()?;
    for len in [x0.len(), v0.len()] {
        if len != 4 {
            return Err(Error::DimensionMismatch { expected: 4, found: len });
        }
    }
    let eta = MetricSpec::minkowski();
    let mut v = v0.to_vec();
    if settings.renormalize_speed {
        let vv = eta.inner(&v, &v);
        if vv.is_nan() || vv <= 0.0 {
            return Err(Error::Config("initial four-velocity is not timelike".into()));
        }
        let s = pot.c / math::sqrt(vv);
        v.iter_mut().for_each(|c| *c *= s);
    }
    let dev = (eta.inner(&v, &v) - pot.c * pot.c).abs();
    if dev.is_nan() || dev >= MASS_SHELL_TOL {
        return Err(Error::InitialDrift { drift: dev });
    }
    Ok(v)
}

/// Lorentz-force worldline in proper time. The drift column is the
/// mass-shell deviation `|η(ẋ, ẋ) − c²|`; the `λ` column is `−q/(mc)`.
pub fn lorentz_integrate(
    pot: &FourPotentialSpec,
    x0: &[f64],
    v0: &[f64],
    settings: &IntegratorSettings,
) -> Result<Trajectory> {
    let v = check_start(pot, x0, v0, settings)?;
    let dynamics = LorentzDynamics { pot: pot.potential()?, eta: MetricSpec::minkowski(), q_over_m: pot.q / pot.m, c: pot.c };
    let mut y0 = x0.to_vec();
    y0.extend_from_slice(&v);
    y0.push(pot.multiplier());
    // the mass shell is a physical invariant, not a constraint to project onto
    let settings = IntegratorSettings { velocity_projection: false, ..settings.clone() };
    curves::run(&dynamics, y0, &settings, "lorentz")
}

/// Geodesics of `Ā = 0` on ℝ⁴ × ℝ with the multiplier held at `λ`.
struct BundleDynamics {
    pot: Potential,
    eta: MetricSpec,
    lambda: f64,
    c: f64,
}

impl BundleDynamics {
    fn check_normal(&self, a: &[f64; 4]) -> Result<()> {
        let q = self.eta.inner_dual(a, a) + 1.0;
        let scale: f64 = a.iter().map(|c| c * c).sum::<f64>() + 1.0;
        if q.abs() < NULL_TOL * scale {
            return Err(Error::NullNormal { norm_sq: q });
        }
        Ok(())
    }
}

impl Dynamics for BundleDynamics {
    fn dim(&self) -> usize {
        5
    }

    fn rhs(&self, y: &[f64]) -> Result<Vec<f64>> {
        let (x, u) = (&y[..5], &y[5..10]);
        let a = self.pot.eval(x);
        self.check_normal(&a)?;
        let f = self.pot.field_strength(x);
        let ub = &u[..4];
        // a^μ = −cλ η^{μν} F_νρ u^ρ
        let acc: Vec<f64> = self.eta.raise(&f.mul_vec(ub)).iter().map(|c| -self.c * self.lambda * c).collect();
        // keeps Ā(u) constant: a^φ = −(∂_ρA_μ u^ρ u^μ + A_μ a^μ)
        let afib = -(self.pot.jacobian(x).bilinear(ub, ub) + math::dot(&a, &acc));
        let mut out = u.to_vec();
        out.extend(acc);
        out.push(afib);
        out.push(0.0);
        Ok(out)
    }

    fn drift(&self, x: &[f64], u: &[f64]) -> Result<f64> {
        let a = self.pot.eval(x);
        self.check_normal(&a)?;
        Ok((math::dot(&a, &u[..4]) + u[4]).abs())
    }

    fn speed(&self, u: &[f64]) -> f64 {
        self.eta.speed(&u[..4])
    }

    fn project(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        let a = self.pot.eval(x);
        let mut out = u.to_vec();
        out[4] = -math::dot(&a, &u[..4]);
        Ok(out)
    }
}

/// Five-dimensional constrained geodesic starting at `(x0, φ = 0)` with
/// fiber velocity `φ̇ = −A(ẋ)`. The drift column is `|Ā(u)|` and the speed
/// column `sqrt|η(ẋ, ẋ)|`.
pub fn constrained_geodesic_em(
    pot: &FourPotentialSpec,
    x0: &[f64],
    v0: &[f64],
    settings: &IntegratorSettings,
) -> Result<Trajectory> {
    let v = check_start(pot, x0, v0, settings)?;
    let dynamics =
        BundleDynamics { pot: pot.potential()?, eta: MetricSpec::minkowski(), lambda: pot.multiplier(), c: pot.c };
    let a0 = dynamics.pot.eval(x0);
    dynamics.check_normal(&a0)?;
    let mut y0 = x0.to_vec();
    y0.push(0.0);
    y0.extend_from_slice(&v);
    y0.push(-math::dot(&a0, &v));
    y0.push(dynamics.lambda);
    // the speed used for rescaling after projection is the 4-dimensional one,
    // which projection of the fiber component leaves unchanged
    curves::run(&dynamics, y0, settings, "em_geodesic")
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Comparison {
    pub max_pointwise_distance: f64,
    pub rms_distance: f64,
    pub samples: usize,
    pub compared_dims: usize,
}

/// Euclidean distances between positions on the shared leading
/// coordinates.
pub fn trajectory_compare(a: &Trajectory, b: &Trajectory) -> Result<Comparison> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::SampleMismatch);
    }
    for (sa, sb) in a.states.iter().zip(&b.states) {
        if (sa.s - sb.s).abs() > 1e-12 * sa.s.abs().max(1.0) {
            return Err(Error::SampleMismatch);
        }
    }
    let d = a.dim().min(b.dim());
    let (mut max, mut sq) = (0.0_f64, 0.0);
    for (sa, sb) in a.states.iter().zip(&b.states) {
        let dist2: f64 = (0..d).map(|i| (sa.x[i] - sb.x[i]) * (sa.x[i] - sb.x[i])).sum();
        max = max.max(math::sqrt(dist2));
        sq += dist2;
    }
    Ok(Comparison {
        max_pointwise_distance: max,
        rms_distance: math::sqrt(sq / a.len() as f64),
        samples: a.len(),
        compared_dims: d,
    })
}

/// Pfaff classification helper re-exported for callers that only hold a
/// potential.
pub fn bundle_degree_at(pot: &FourPotentialSpec, x: &[f64], tol: f64) -> Result<usize> {
    let mut x5 = x.to_vec();
    x5.push(0.0);
    let bundle = build_bundle_form(pot)?.compile()?;
    Ok(pfaff::integrability_class_at_point(&bundle, &MetricSpec::bundle5(), &x5, tol)?.degree_of_integrability)
}
