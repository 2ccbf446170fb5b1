//! Covector fields, their first derivatives, and exterior products.
//!
//! Two-forms are stored as antisymmetric matrices `W` with the form equal
//! to `½ W_ij dxⁱ∧dxʲ`, so `d∧N` has `W_ij = ∂_i N_j − ∂_j N_i`. As an
//! [`AltTensor`] the same form has component `W_ij` on each tuple `i < j`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::em::FourPotentialSpec;
use crate::linalg::SquareMatrix;
use crate::math;
use crate::poly::Polynomial;
use crate::{Error, Result};

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 6;

/// Relative threshold below which `|g⁻¹(N, N)|` counts as null.
pub const NULL_TOL: f64 = 1e-12;

/// Constant diagonal metric on ℝᵈ.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MetricSpec {
    dim: usize,
    diag: Vec<f64>,
    inverse_diag: Vec<f64>,
}

impl MetricSpec {
    /// Diagonal metric with the given entries. Every entry must be nonzero
    /// and have an exactly representable reciprocal.
    pub fn diagonal(diag: Vec<f64>) -> Result<Self> {
        check_dim(diag.len())?;
        let mut inverse_diag = Vec::with_capacity(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            if d == 0.0 || !d.is_finite() {
                return Err(Error::Config(format!("metric entry {i} must be finite and nonzero")));
            }
            let inv = 1.0 / d;
            if inv * d != 1.0 {
                return Err(Error::Config(format!(
                    "metric entry {i} = {d} has no exactly representable inverse"
                )));
            }
            inverse_diag.push(inv);
        }
        Ok(Self { dim: diag.len(), diag, inverse_diag })
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::diagonal(vec![1.0; dim])
    }

    pub fn minkowski() -> Self {
        Self::diagonal(vec![1.0, -1.0, -1.0, -1.0]).expect("valid preset")
    }

    /// `η ⊕ δ` on spacetime × fiber.
    pub fn bundle5() -> Self {
        Self::diagonal(vec![1.0, -1.0, -1.0, -1.0, 1.0]).expect("valid preset")
    }

    /// Named preset; `minkowski` needs `dim = 4` and `bundle5` needs `dim = 5`.
    pub fn preset(name: &str, dim: usize) -> Result<Self> {
        match name {
            "euclidean" => Self::euclidean(dim),
            "minkowski" if dim == 4 => Ok(Self::minkowski()),
            "bundle5" if dim == 5 => Ok(Self::bundle5()),
            "minkowski" => Err(Error::Config(format!("preset \"minkowski\" requires dimension 4, got {dim}"))),
            "bundle5" => Err(Error::Config(format!("preset \"bundle5\" requires dimension 5, got {dim}"))),
            other => Err(Error::Config(format!("unknown metric preset \"{other}\""))),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn inverse_diag(&self) -> &[f64] {
        &self.inverse_diag
    }

    pub fn is_euclidean(&self) -> bool {
        self.diag.iter().all(|&d| d == 1.0)
    }

    pub fn matrix(&self) -> SquareMatrix {
        SquareMatrix::from_diag(&self.diag)
    }

    /// `g(u, v)` on vectors.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        (0..self.dim).map(|i| self.diag[i] * u[i] * v[i]).sum()
    }

    /// `g⁻¹(a, b)` on covectors.
    pub fn inner_dual(&self, a: &[f64], b: &[f64]) -> f64 {
        (0..self.dim).map(|i| self.inverse_diag[i] * a[i] * b[i]).sum()
    }

    pub fn lower(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.diag).map(|(a, d)| a * d).collect()
    }

    pub fn raise(&self, c: &[f64]) -> Vec<f64> {
        c.iter().zip(&self.inverse_diag).map(|(a, d)| a * d).collect()
    }

    /// `sqrt |g(v, v)|`.
    pub fn speed(&self, v: &[f64]) -> f64 {
        math::sqrt(self.inner(v, v).abs())
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if (MIN_DIM..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::Config(format!("dimension {dim} outside {MIN_DIM}..={MAX_DIM}")))
    }
}

/// Built-in covector fields.
#[derive(Debug, Clone, PartialEq)]
pub enum CatalogForm {
    /// `N = dφ` with `φ = ½|x|²`, i.e. `N_i = x_i`.
    ExactSphere,
    /// `N = dx^d`, the last coordinate differential.
    Linear,
    /// `N = λ(x) dφ`.
    IntegratingFactor { lambda: Polynomial, phi: Polynomial },
    /// `N = dz − y dx` in ℝ³.
    Contact,
    /// `N = dx¹ + Σᵢ₌₁ᵏ x²ⁱ dx²ⁱ⁺¹` (one-based coordinates).
    Darboux { k: usize },
    /// The bundle form `A + dφ` of an electromagnetic potential.
    Em(FourPotentialSpec),
}

impl CatalogForm {
    pub fn name(&self) -> &'static str {
        match self {
            CatalogForm::ExactSphere => "exact_sphere",
            CatalogForm::Linear => "linear",
            CatalogForm::IntegratingFactor { .. } => "integrating_factor",
            CatalogForm::Contact => "contact",
            CatalogForm::Darboux { .. } => "darboux_k",
            CatalogForm::Em(_) => "em",
        }
    }

    /// `λ = 1 + x₀²`, `φ = x_{d−1}`.
    pub fn default_integrating_factor(dim: usize) -> Self {
        let x0 = Polynomial::linear(dim, 0, 1.0);
        let lambda = Polynomial::constant(dim, 1.0).add(&x0.mul(&x0));
        let phi = Polynomial::linear(dim, dim - 1, 1.0);
        CatalogForm::IntegratingFactor { lambda, phi }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    Catalog(CatalogForm),
    /// One polynomial per component `N_i`.
    Polynomial(Vec<Polynomial>),
}

/// Declarative description of a Pfaffian form `N = N_i dxⁱ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovectorFieldSpec {
    pub dim: usize,
    pub kind: FieldKind,
}

impl CovectorFieldSpec {
    pub fn catalog(dim: usize, form: CatalogForm) -> Self {
        Self { dim, kind: FieldKind::Catalog(form) }
    }

    pub fn polynomial(components: Vec<Polynomial>) -> Self {
        Self { dim: components.len(), kind: FieldKind::Polynomial(components) }
    }

    /// Validates the spec and lowers it to polynomial components with their
    /// derivatives.
    pub fn compile(&self) -> Result<CovectorField> {
        CovectorField::new(self)
    }

    pub fn label(&self) -> String {
        match &self.kind {
            FieldKind::Catalog(CatalogForm::Darboux { k }) => format!("darboux_{k}"),
            FieldKind::Catalog(c) => String::from(c.name()),
            FieldKind::Polynomial(_) => String::from("polynomial"),
        }
    }
}

/// A covector field ready for evaluation: components `N_j` and the table of
/// partial derivatives `∂_i N_j`.
#[derive(Debug, Clone)]
pub struct CovectorField {
    dim: usize,
    components: Vec<Polynomial>,
    jacobian: Vec<Vec<Polynomial>>,
}

impl CovectorField {
    pub fn new(spec: &CovectorFieldSpec) -> Result<Self> {
        let dim = spec.dim;
        check_dim(dim)?;
        let components = match &spec.kind {
            FieldKind::Polynomial(c) => c.clone(),
            FieldKind::Catalog(form) => catalog_components(dim, form)?,
        };
        if components.len() != dim {
            return Err(Error::Config(format!(
                "form has {} components, expected {dim}",
                components.len()
            )));
        }
        for (j, c) in components.iter().enumerate() {
            if c.dim() != dim {
                return Err(Error::Config(format!(
                    "component {j} is a polynomial in {} variables, expected {dim}",
                    c.dim()
                )));
            }
        }
        let jacobian = (0..dim)
            .map(|i| components.iter().map(|c| c.partial(i)).collect())
            .collect();
        Ok(Self { dim, components, jacobian })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok(())
    }

    /// Raw `∂_i N_j`.
    pub fn raw_jacobian(&self, x: &[f64]) -> SquareMatrix {
        SquareMatrix::from_fn(self.dim, |i, j| self.jacobian[i][j].eval(x))
    }
}

fn catalog_components(dim: usize, form: &CatalogForm) -> Result<Vec<Polynomial>> {
    let comps = match form {
        CatalogForm::ExactSphere => (0..dim).map(|i| Polynomial::linear(dim, i, 1.0)).collect(),
        CatalogForm::Linear => {
            let mut c: Vec<Polynomial> = (0..dim).map(|_| Polynomial::zero(dim)).collect();
            c[dim - 1] = Polynomial::constant(dim, 1.0);
            c
        }
        CatalogForm::IntegratingFactor { lambda, phi } => {
            if lambda.dim() != dim || phi.dim() != dim {
                return Err(Error::Config(format!(
                    "integrating_factor polynomials must have {dim} variables"
                )));
            }
            phi.gradient().iter().map(|g| lambda.mul(g)).collect()
        }
        CatalogForm::Contact => {
            if dim != 3 {
                return Err(Error::Config(format!("contact form requires dimension 3, got {dim}")));
            }
            vec![
                Polynomial::linear(3, 1, -1.0),
                Polynomial::zero(3),
                Polynomial::constant(3, 1.0),
            ]
        }
        CatalogForm::Darboux { k } => {
            if 2 * k + 1 > dim {
                return Err(Error::Config(format!(
                    "darboux_{k} needs dimension at least {}, got {dim}",
                    2 * k + 1
                )));
            }
            let mut c: Vec<Polynomial> = (0..dim).map(|_| Polynomial::zero(dim)).collect();
            c[0] = Polynomial::constant(dim, 1.0);
            for i in 1..=*k {
                c[2 * i] = Polynomial::linear(dim, 2 * i - 1, 1.0);
            }
            c
        }
        CatalogForm::Em(pot) => {
            if dim != 5 {
                return Err(Error::Config(format!("em bundle form has dimension 5, got {dim}")));
            }
            match crate::em::build_bundle_form(pot)?.kind {
                FieldKind::Polynomial(c) => c,
                FieldKind::Catalog(_) => unreachable!("bundle form is polynomial"),
            }
        }
    };
    Ok(comps)
}

/// Raw (unnormalized) `N_i(x)`.
pub fn eval_covector(field: &CovectorField, x: &[f64]) -> Result<Vec<f64>> {
    field.check_point(x)?;
    Ok(field.components.iter().map(|c| c.eval(x)).collect())
}

/// A covector normalized under the metric and its raised vector.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct UnitNormal {
    pub n_cov: Vec<f64>,
    pub n_vec: Vec<f64>,
    /// `sqrt |g⁻¹(N_raw, N_raw)|`.
    pub norm: f64,
    /// `g(N_vec, N_vec)`, either `+1` or `−1`.
    pub signature: f64,
}

/// Normalizes `n_raw` to `|g⁻¹(N, N)| = 1` and raises its index.
pub fn metric_dual_unit(n_raw: &[f64], metric: &MetricSpec) -> Result<UnitNormal> {
    if n_raw.len() != metric.dim() {
        return Err(Error::DimensionMismatch { expected: metric.dim(), found: n_raw.len() });
    }
    if n_raw.iter().all(|&c| c == 0.0) {
        return Err(Error::ZeroForm);
    }
    let q = metric.inner_dual(n_raw, n_raw);
    let scale: f64 = n_raw.iter().zip(metric.inverse_diag()).map(|(a, d)| d.abs() * a * a).sum();
    if q.abs() < NULL_TOL * scale || !q.is_finite() {
        return Err(Error::NullNormal { norm_sq: q });
    }
    let norm = math::sqrt(q.abs());
    let n_cov: Vec<f64> = n_raw.iter().map(|a| a / norm).collect();
    let n_vec = metric.raise(&n_cov);
    Ok(UnitNormal { n_cov, n_vec, norm, signature: q.signum() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DiffMode {
    Analytic,
    FiniteDiff,
}

/// Everything the geometry needs at one point: the unit normal and the
/// split of the derivative of the *unit* field into symmetric and
/// antisymmetric parts.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PointGeometry {
    pub x: Vec<f64>,
    pub n_cov: Vec<f64>,
    pub n_vec: Vec<f64>,
    pub raw_norm: f64,
    pub signature: f64,
    /// `J[i][j] = ∂_i N_j`.
    pub jacobian: SquareMatrix,
    /// `½(J + Jᵀ)`.
    pub h: SquareMatrix,
    /// `J − Jᵀ`.
    pub w: SquareMatrix,
}

impl PointGeometry {
    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// `N(v)` with the unit covector.
    pub fn constraint(&self, v: &[f64]) -> f64 {
        math::dot(&self.n_cov, v)
    }

    pub fn two_form(&self) -> AltTensor {
        AltTensor::from_two_form_matrix(&self.w)
    }

    pub fn one_form(&self) -> AltTensor {
        AltTensor::from_covector(&self.n_cov)
    }
}

fn split(x: &[f64], unit: UnitNormal, jacobian: SquareMatrix) -> PointGeometry {
    let n = jacobian.dim();
    let h = SquareMatrix::from_fn(n, |i, j| 0.5 * (jacobian[(i, j)] + jacobian[(j, i)]));
    let w = SquareMatrix::from_fn(n, |i, j| jacobian[(i, j)] - jacobian[(j, i)]);
    PointGeometry {
        x: x.to_vec(),
        n_cov: unit.n_cov,
        n_vec: unit.n_vec,
        raw_norm: unit.norm,
        signature: unit.signature,
        jacobian,
        h,
        w,
    }
}

/// Unit-normalized field and the symmetric/antisymmetric split of its
/// derivative at `x`.
pub fn differential_split(
    field: &CovectorField,
    metric: &MetricSpec,
    x: &[f64],
    mode: DiffMode,
) -> Result<PointGeometry> {
    field.check_point(x)?;
    if metric.dim() != field.dim {
        return Err(Error::DimensionMismatch { expected: field.dim, found: metric.dim() });
    }
    let raw = eval_covector(field, x)?;
    let unit = metric_dual_unit(&raw, metric)?;
    let jac = match mode {
        DiffMode::Analytic => unit_jacobian_analytic(field, metric, x, &raw, &unit),
        DiffMode::FiniteDiff => unit_jacobian_fd(field, metric, x)?,
    };
    Ok(split(x, unit, jac))
}

/// Quotient rule for `N / ρ`, `ρ = sqrt|g⁻¹(N, N)|`.
fn unit_jacobian_analytic(
    field: &CovectorField,
    metric: &MetricSpec,
    x: &[f64],
    raw: &[f64],
    unit: &UnitNormal,
) -> SquareMatrix {
    let n = field.dim;
    let rho = unit.norm;
    let jr = field.raw_jacobian(x);
    let raw_up = metric.raise(raw);
    // ∂_i ρ = sign(q) · g^{kk} N_k ∂_i N_k / ρ
    let drho: Vec<f64> = (0..n)
        .map(|i| unit.signature * math::dot(&raw_up, jr.row(i)) / rho)
        .collect();
    SquareMatrix::from_fn(n, |i, j| jr[(i, j)] / rho - raw[j] * drho[i] / (rho * rho))
}

fn unit_jacobian_fd(field: &CovectorField, metric: &MetricSpec, x: &[f64]) -> Result<SquareMatrix> {
    let n = field.dim;
    let base_step = math::cbrt(f64::EPSILON);
    let mut jac = SquareMatrix::zeros(n);
    let mut xp = x.to_vec();
    for i in 0..n {
        let h = base_step * x[i].abs().max(1.0);
        let (hi, lo) = (x[i] + h, x[i] - h);
        xp[i] = hi;
        let up = metric_dual_unit(&eval_covector(field, &xp)?, metric)?;
        xp[i] = lo;
        let dn = metric_dual_unit(&eval_covector(field, &xp)?, metric)?;
        xp[i] = x[i];
        let width = hi - lo;
        for j in 0..n {
            jac[(i, j)] = (up.n_cov[j] - dn.n_cov[j]) / width;
        }
    }
    Ok(jac)
}

/// Number of `k`-subsets of `n` elements.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Strictly increasing `k`-tuples of `0..n` in lexicographic order.
pub fn index_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k));
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        // advance the rightmost index that still has room
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Sorts `idx` in place, returning the permutation sign, or `None` when an
/// index repeats.
fn sort_with_sign(idx: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// Totally antisymmetric covariant tensor, stored on canonical
/// strictly-increasing index tuples.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AltTensor {
    dim: usize,
    degree: usize,
    components: Vec<f64>,
}

impl AltTensor {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Self { dim, degree, components: vec![0.0; binomial(dim, degree)] }
    }

    /// Components listed in the order of [`index_tuples`].
    pub fn from_components(dim: usize, degree: usize, components: Vec<f64>) -> Result<Self> {
        if components.len() != binomial(dim, degree) {
            return Err(Error::DimensionMismatch {
                expected: binomial(dim, degree),
                found: components.len(),
            });
        }
        Ok(Self { dim, degree, components })
    }

    pub fn from_covector(c: &[f64]) -> Self {
        Self { dim: c.len(), degree: 1, components: c.to_vec() }
    }

    /// Two-form `½ W_ij dxⁱ∧dxʲ` from its antisymmetric matrix.
    pub fn from_two_form_matrix(w: &SquareMatrix) -> Self {
        let n = w.dim();
        let components = index_tuples(n, 2).iter().map(|t| w[(t[0], t[1])]).collect();
        Self { dim: n, degree: 2, components }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    fn position(&self, sorted: &[usize]) -> usize {
        // rank of a combination in lexicographic order
        let k = self.degree;
        let mut rank = 0;
        let mut prev = 0;
        for (pos, &c) in sorted.iter().enumerate() {
            for v in prev..c {
                rank += binomial(self.dim - v - 1, k - pos - 1);
            }
            prev = c + 1;
        }
        rank
    }

    /// Component on an arbitrary index tuple, carrying the permutation sign.
    pub fn component(&self, idx: &[usize]) -> f64 {
        assert_eq!(idx.len(), self.degree, "index tuple has the wrong length");
        let mut sorted = idx.to_vec();
        match sort_with_sign(&mut sorted) {
            Some(sign) => sign * self.components[self.position(&sorted)],
            None => 0.0,
        }
    }

    pub fn max_abs(&self) -> f64 {
        math::max_abs(&self.components)
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::norm(&self.components)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            degree: self.degree,
            components: self.components.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim || self.degree != other.degree {
            return Err(Error::DimensionMismatch { expected: self.components.len(), found: other.components.len() });
        }
        let components = self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect();
        Ok(Self { dim: self.dim, degree: self.degree, components })
    }

    /// Exterior product with `dxⁱ∧dxʲ` having component `+1` on `(i, j)`.
    ///
    /// When the degrees add up past the dimension the product is the zero
    /// tensor of degree `dim`.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let (p, q) = (self.degree, other.degree);
        let deg = p + q;
        if deg > self.dim {
            return Ok(Self::zero(self.dim, self.dim));
        }
        let splits = index_tuples(deg, p);
        let components = index_tuples(self.dim, deg)
            .iter()
            .map(|tuple| {
                splits
                    .iter()
                    .map(|positions| {
                        // shuffle sign: (−1)^Σ(position − rank)
                        let parity: usize = positions.iter().enumerate().map(|(r, &pos)| pos - r).sum();
                        let sign = if parity.is_multiple_of(2) { 1.0 } else { -1.0 };
                        let left: Vec<usize> = positions.iter().map(|&pos| tuple[pos]).collect();
                        let right: Vec<usize> = (0..deg)
                            .filter(|pos| !positions.contains(pos))
                            .map(|pos| tuple[pos])
                            .collect();
                        sign * self.components[self.position(&left)] * other.components[other.position(&right)]
                    })
                    .sum()
            })
            .collect();
        Ok(Self { dim: self.dim, degree: deg, components })
    }
}

/// `a ∧ b`; see [`AltTensor::wedge`].
pub fn wedge_product(a: &AltTensor, b: &AltTensor) -> Result<AltTensor> {
    a.wedge(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(dim: usize, form: CatalogForm) -> CovectorField {
        CovectorFieldSpec::catalog(dim, form).compile().unwrap()
    }

    #[test]
    fn eval_catalog_examples() {
        assert_eq!(eval_covector(&field(3, CatalogForm::Contact), &[1.0, 2.0, 5.0]).unwrap(), vec![-2.0, 0.0, 1.0]);
        assert_eq!(eval_covector(&field(3, CatalogForm::ExactSphere), &[0.0, 0.0, 2.0]).unwrap(), vec![0.0, 0.0, 2.0]);
        assert_eq!(eval_covector(&field(4, CatalogForm::Linear), &[3.0, -1.0, 7.0, 0.5]).unwrap(), vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn darboux_components() {
        let f = field(5, CatalogForm::Darboux { k: 2 });
        assert_eq!(eval_covector(&f, &[9.0, 2.0, 8.0, 3.0, 7.0]).unwrap(), vec![1.0, 0.0, 2.0, 0.0, 3.0]);
        assert!(CovectorFieldSpec::catalog(4, CatalogForm::Darboux { k: 2 }).compile().is_err());
    }

    #[test]
    fn dimension_mismatch_is_config_error() {
        let f = field(3, CatalogForm::Contact);
        assert_eq!(eval_covector(&f, &[1.0, 2.0]).unwrap_err(), Error::DimensionMismatch { expected: 3, found: 2 });
        assert!(CovectorFieldSpec::catalog(4, CatalogForm::Contact).compile().is_err());
        assert!(CovectorFieldSpec::catalog(7, CatalogForm::Linear).compile().is_err());
    }

    #[test]
    fn metric_presets() {
        assert!(MetricSpec::preset("minkowski", 3).is_err());
        assert!(MetricSpec::preset("bundle5", 4).is_err());
        let m = MetricSpec::preset("bundle5", 5).unwrap();
        assert_eq!(m.diag(), &[1.0, -1.0, -1.0, -1.0, 1.0]);
        for (d, i) in m.diag().iter().zip(m.inverse_diag()) {
            assert_eq!(d * i, 1.0);
        }
        assert!(MetricSpec::diagonal(vec![1.0, 0.0]).is_err());
        assert!(MetricSpec::diagonal(vec![2.0, 4.0, 0.5]).is_ok());
    }

    #[test]
    fn metric_dual_unit_examples() {
        let e3 = MetricSpec::euclidean(3).unwrap();
        let u = metric_dual_unit(&[0.0, 0.0, 2.0], &e3).unwrap();
        assert_eq!(u.norm, 2.0);
        assert_eq!(u.n_cov, vec![0.0, 0.0, 1.0]);
        assert_eq!(u.n_vec, vec![0.0, 0.0, 1.0]);

        let u = metric_dual_unit(&[3.0, 4.0, 0.0], &e3).unwrap();
        assert_eq!(u.norm, 5.0);
        assert!((u.n_cov[0] - 0.6).abs() < 1e-15 && (u.n_cov[1] - 0.8).abs() < 1e-15);

        let err = metric_dual_unit(&[0.0, 1.0, 0.0, 0.0, 1.0], &MetricSpec::bundle5()).unwrap_err();
        assert!(matches!(err, Error::NullNormal { .. }));
        assert_eq!(metric_dual_unit(&[0.0; 3], &e3).unwrap_err(), Error::ZeroForm);
    }

    #[test]
    fn minkowski_unit_is_signed() {
        let u = metric_dual_unit(&[0.0, 2.0, 0.0, 0.0], &MetricSpec::minkowski()).unwrap();
        assert_eq!(u.signature, -1.0);
        assert_eq!(u.n_vec, vec![0.0, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn contact_split_at_origin() {
        let g = differential_split(
            &field(3, CatalogForm::Contact),
            &MetricSpec::euclidean(3).unwrap(),
            &[0.0, 0.0, 0.0],
            DiffMode::Analytic,
        )
        .unwrap();
        // J[y][x] = ∂_y N_x = −1 and nothing else
        let mut expected = SquareMatrix::zeros(3);
        expected[(1, 0)] = -1.0;
        assert_eq!(g.jacobian, expected);
        assert_eq!(g.h[(0, 1)], -0.5);
        assert_eq!(g.h[(1, 0)], -0.5);
        assert_eq!(g.w[(0, 1)], 1.0);
        assert_eq!(g.w[(1, 0)], -1.0);
    }

    #[test]
    fn sphere_split_at_pole() {
        let g = differential_split(
            &field(3, CatalogForm::ExactSphere),
            &MetricSpec::euclidean(3).unwrap(),
            &[0.0, 0.0, 2.0],
            DiffMode::Analytic,
        )
        .unwrap();
        // δ_ij / r − x_i x_j / r³ at r = 2
        assert!((g.h[(0, 0)] - 0.5).abs() < 1e-15);
        assert!((g.h[(1, 1)] - 0.5).abs() < 1e-15);
        assert!(g.h[(2, 2)].abs() < 1e-15);
        assert!(g.w.max_abs() < 1e-15);
    }

    #[test]
    fn linear_split_vanishes() {
        let g = differential_split(
            &field(4, CatalogForm::Linear),
            &MetricSpec::euclidean(4).unwrap(),
            &[1.0, 2.0, 3.0, 4.0],
            DiffMode::FiniteDiff,
        )
        .unwrap();
        assert_eq!(g.jacobian.max_abs(), 0.0);
        assert_eq!(g.h.max_abs(), 0.0);
        assert_eq!(g.w.max_abs(), 0.0);
    }

    #[test]
    fn sphere_origin_is_zero_form() {
        let err = differential_split(
            &field(3, CatalogForm::ExactSphere),
            &MetricSpec::euclidean(3).unwrap(),
            &[0.0; 3],
            DiffMode::Analytic,
        )
        .unwrap_err();
        assert_eq!(err, Error::ZeroForm);
    }

    #[test]
    fn index_tuples_are_lexicographic() {
        assert_eq!(index_tuples(4, 2), vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(index_tuples(3, 3), vec![vec![0, 1, 2]]);
        for n in 2..=6 {
            for k in 1..=n {
                assert_eq!(index_tuples(n, k).len(), binomial(n, k));
            }
        }
    }

    #[test]
    fn component_carries_permutation_sign() {
        let mut w = SquareMatrix::zeros(3);
        w[(0, 2)] = 4.0;
        w[(2, 0)] = -4.0;
        let t = AltTensor::from_two_form_matrix(&w);
        assert_eq!(t.component(&[0, 2]), 4.0);
        assert_eq!(t.component(&[2, 0]), -4.0);
        assert_eq!(t.component(&[1, 1]), 0.0);
    }

    #[test]
    fn wedge_of_basis_covectors() {
        let dx = AltTensor::from_covector(&[1.0, 0.0, 0.0]);
        let dy = AltTensor::from_covector(&[0.0, 1.0, 0.0]);
        let dxdy = dx.wedge(&dy).unwrap();
        assert_eq!(dxdy.component(&[0, 1]), 1.0);
        assert_eq!(dy.wedge(&dx).unwrap().component(&[0, 1]), -1.0);
    }

    #[test]
    fn contact_n_wedge_dn_is_volume() {
        // (dz − y dx) ∧ dx∧dy = dx∧dy∧dz at any y
        let n = AltTensor::from_covector(&[-0.7, 0.0, 1.0]);
        let mut w = SquareMatrix::zeros(3);
        w[(0, 1)] = 1.0;
        w[(1, 0)] = -1.0;
        let t = n.wedge(&AltTensor::from_two_form_matrix(&w)).unwrap();
        assert_eq!(t.components(), &[1.0]);
    }

    #[test]
    fn f_wedge_f_is_twice_pfaffian() {
        let (e, b) = (1.5, -0.25);
        let mut f = SquareMatrix::zeros(4);
        f[(0, 1)] = e;
        f[(1, 0)] = -e;
        f[(2, 3)] = b;
        f[(3, 2)] = -b;
        let ff = AltTensor::from_two_form_matrix(&f).wedge(&AltTensor::from_two_form_matrix(&f)).unwrap();
        assert_eq!(ff.components(), &[2.0 * e * b]);
    }

    #[test]
    fn degree_overflow_gives_zero_top_form() {
        let a = AltTensor::from_covector(&[1.0, 2.0, 3.0]);
        let w = AltTensor::zero(3, 3);
        let t = a.wedge(&w).unwrap();
        assert_eq!(t.degree(), 3);
        assert_eq!(t.max_abs(), 0.0);
    }
}
