//! Adapted frames, projectors and curvature on the hyperplane field `Σ`.
//!
//! Tangent vectors of `Σ_x` are written in frame coordinates `vᵃ = θᵃ(v)`
//! with respect to an [`AdaptedFrame`]. The restricted metric in those
//! coordinates is `diag(signs)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::forms::{differential_split, CovectorField, DiffMode, MetricSpec, PointGeometry};
use crate::linalg::{self, SquareMatrix};
use crate::math;
use crate::{Error, Result};

/// Relative threshold for a null pivot during orthonormalization.
pub const DEGENERATE_TOL: f64 = 1e-10;
pub const DEFAULT_EIGEN_ZERO: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Projectors {
    /// `I − P_n`.
    pub tangent: SquareMatrix,
    /// `[P_n]ⁱ_j = Nⁱ N_j / g(N, N)`.
    pub normal: SquareMatrix,
}

/// Splits vectors into their `Σ_x` part and their part along `N_vec`.
///
/// The division by `g(N, N) = ±1` keeps both maps idempotent when the
/// normal is timelike-negative under an indefinite metric.
pub fn tangent_projectors(geom: &PointGeometry) -> Projectors {
    let n = geom.dim();
    let eps = geom.signature;
    let normal = SquareMatrix::from_fn(n, |i, j| geom.n_vec[i] * geom.n_cov[j] / eps);
    let tangent = SquareMatrix::identity(n).sub(&normal);
    Projectors { tangent, normal }
}

/// `P_t v` without building the matrix.
pub fn project_tangent(geom: &PointGeometry, v: &[f64]) -> Vec<f64> {
    let c = geom.constraint(v) / geom.signature;
    v.iter().zip(&geom.n_vec).map(|(vi, ni)| vi - c * ni).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotOrder {
    /// At each step take the projected axis with the largest residual.
    #[default]
    LargestResidual,
    /// Take projected axes from the last coordinate down, skipping any
    /// that are already (numerically) spanned.
    Reversed,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AdaptedFrame {
    pub x: Vec<f64>,
    /// `n = dim − 1` vectors spanning `Σ_x` with `g(e_a, e_b) = signs[a] δ_ab`.
    pub tangent_basis: Vec<Vec<f64>>,
    pub signs: Vec<f64>,
    pub normal: Vec<f64>,
    /// `θᵃ = signs[a] · g(e_a, ·)`, so `θᵃ(e_b) = δᵃ_b` and `θᵃ(N_vec) = 0`.
    pub coframe: Vec<Vec<f64>>,
}

impl AdaptedFrame {
    pub fn rank(&self) -> usize {
        self.tangent_basis.len()
    }

    pub fn restricted_metric(&self) -> SquareMatrix {
        SquareMatrix::from_diag(&self.signs)
    }

    /// Frame coordinates `θᵃ(v)`.
    pub fn to_frame(&self, v: &[f64]) -> Vec<f64> {
        self.coframe.iter().map(|th| math::dot(th, v)).collect()
    }

    /// Ambient vector `vᵃ e_a`.
    pub fn to_ambient(&self, coords: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.x.len()];
        for (c, e) in coords.iter().zip(&self.tangent_basis) {
            for (o, ei) in out.iter_mut().zip(e) {
                *o += c * ei;
            }
        }
        out
    }
}

pub fn adapted_frame(geom: &PointGeometry, metric: &MetricSpec) -> Result<AdaptedFrame> {
    adapted_frame_with(geom, metric, PivotOrder::default())
}

/// Column-pivoted Gram–Schmidt on `{P_t ∂_i}` under `g`.
pub fn adapted_frame_with(geom: &PointGeometry, metric: &MetricSpec, order: PivotOrder) -> Result<AdaptedFrame> {
    let dim = geom.dim();
    if metric.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: metric.dim() });
    }
    let p = tangent_projectors(geom).tangent;
    let columns: Vec<Vec<f64>> = (0..dim).map(|j| (0..dim).map(|i| p[(i, j)]).collect()).collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim - 1);
    let mut signs: Vec<f64> = Vec::with_capacity(dim - 1);
    let mut used = vec![false; dim];

    let residual = |c: &[f64], basis: &[Vec<f64>], signs: &[f64]| {
        let mut r = c.to_vec();
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for (e, s) in basis.iter().zip(signs) {
                let coef = s * metric.inner(e, &r);
                for (ri, ei) in r.iter_mut().zip(e) {
                    *ri -= coef * ei;
                }
            }
        }
        // keep the residual inside Σ_x
        project_tangent(geom, &r)
    };

    while basis.len() < dim - 1 {
        let candidates: Vec<(usize, Vec<f64>)> = (0..dim)
            .filter(|&j| !used[j])
            .map(|j| (j, residual(&columns[j], &basis, &signs)))
            .collect();
        let pick = match order {
            PivotOrder::LargestResidual => candidates
                .iter()
                .fold(None::<&(usize, Vec<f64>)>, |best, c| match best {
                    Some(b) if math::norm(&b.1) >= math::norm(&c.1) => Some(b),
                    _ => Some(c),
                }),
            PivotOrder::Reversed => {
                let biggest = candidates.iter().map(|c| math::norm(&c.1)).fold(0.0, f64::max);
                candidates.iter().rev().find(|c| math::norm(&c.1) > 1e-6 * biggest)
            }
        };
        let (j, r) = match pick {
            Some((j, r)) => (*j, r.clone()),
            None => return Err(Error::DegenerateTangentMetric),
        };
        used[j] = true;
        let rr = math::dot(&r, &r);
        let grr = metric.inner(&r, &r);
        if rr == 0.0 || grr.abs() < DEGENERATE_TOL * rr {
            return Err(Error::DegenerateTangentMetric);
        }
        let scale = math::sqrt(grr.abs());
        basis.push(r.iter().map(|v| v / scale).collect());
        signs.push(grr.signum());
    }

    let coframe = basis
        .iter()
        .zip(&signs)
        .map(|(e, s)| metric.lower(e).into_iter().map(|c| c * s).collect())
        .collect();
    Ok(AdaptedFrame { x: geom.x.clone(), tangent_basis: basis, signs, normal: geom.n_vec.clone(), coframe })
}

/// `H̄_ab = H(e_a, e_b)`.
pub fn second_fundamental_restricted(geom: &PointGeometry, frame: &AdaptedFrame) -> SquareMatrix {
    let e = &frame.tangent_basis;
    SquareMatrix::from_fn(frame.rank(), |a, b| geom.h.bilinear(&e[a], &e[b]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum PointClass {
    Elliptic,
    Hyperbolic,
    Parabolic,
    Umbilic,
    Flat,
    IndefiniteMetric,
}

impl PointClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            PointClass::Elliptic => "elliptic",
            PointClass::Hyperbolic => "hyperbolic",
            PointClass::Parabolic => "parabolic",
            PointClass::Umbilic => "umbilic",
            PointClass::Flat => "flat",
            PointClass::IndefiniteMetric => "indefinite-metric",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CurvatureReport {
    /// Real parts, ascending.
    pub principal_curvatures: Vec<f64>,
    /// Imaginary parts matching `principal_curvatures`; all zero for a
    /// definite restricted metric.
    pub imaginary_parts: Vec<f64>,
    pub complex_spectrum: bool,
    pub classification: PointClass,
    pub mean_curvature: f64,
    pub gaussian_curvature: f64,
    pub radii: Vec<f64>,
    /// Unit eigenvectors in frame coordinates (definite metrics only).
    #[cfg_attr(feature = "serde", serde(skip))]
    pub principal_directions: Vec<Vec<f64>>,
}

fn is_zero(k: f64, tol: f64, radius: f64) -> bool {
    k.abs() < tol * radius.max(1.0)
}

fn classify(kappa: &[f64], tol: f64) -> PointClass {
    let radius = kappa.iter().fold(0.0_f64, |m, k| m.max(k.abs()));
    let zero = |k: f64| is_zero(k, tol, radius);
    if kappa.iter().all(|&k| zero(k)) {
        PointClass::Flat
    } else if kappa.windows(2).all(|w| zero(w[1] - w[0])) {
        PointClass::Umbilic
    } else if kappa.iter().any(|&k| zero(k)) {
        PointClass::Parabolic
    } else if kappa.iter().all(|&k| k > 0.0) || kappa.iter().all(|&k| k < 0.0) {
        PointClass::Elliptic
    } else {
        PointClass::Hyperbolic
    }
}

/// Principal curvatures: the eigenvalues of `gᵃᶜ H̄_cb`.
pub fn curvature_report(hbar: &SquareMatrix, restricted_metric: &SquareMatrix, tol: f64) -> Result<CurvatureReport> {
    let n = hbar.dim();
    if restricted_metric.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: restricted_metric.dim() });
    }
    let ginv = linalg::inverse(restricted_metric).ok_or(Error::SingularMetric)?;
    let (gvals, _) = linalg::symmetric_eigen(restricted_metric);
    let gscale = gvals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if gvals.iter().any(|v| v.abs() <= 1e-14 * gscale) || gscale == 0.0 {
        return Err(Error::SingularMetric);
    }
    let definite_sign = if gvals.iter().all(|&v| v > 0.0) {
        Some(1.0)
    } else if gvals.iter().all(|&v| v < 0.0) {
        Some(-1.0)
    } else {
        None
    };

    let (kappa, imag, directions) = match definite_sign {
        Some(sign) => {
            // g' = L Lᵀ; eigen of L⁻¹ H' L⁻ᵀ with H' = sign·H̄ has the spectrum of g⁻¹H̄
            let gp = SquareMatrix::from_fn(n, |i, j| sign * restricted_metric[(i, j)]).to_nalgebra();
            let chol = nalgebra::Cholesky::new(gp).ok_or(Error::SingularMetric)?;
            let l_inv = chol.l().try_inverse().ok_or(Error::SingularMetric)?;
            let hp = SquareMatrix::from_fn(n, |i, j| sign * hbar[(i, j)]).to_nalgebra();
            let m = &l_inv * hp * l_inv.transpose();
            let (vals, vecs) = linalg::symmetric_eigen(&SquareMatrix::from_nalgebra(&m));
            let lt_inv = l_inv.transpose();
            let dirs = vecs
                .iter()
                .map(|y| {
                    let w = &lt_inv * nalgebra::DVector::from_column_slice(y);
                    w.iter().copied().collect()
                })
                .collect();
            (vals, vec![0.0; n], dirs)
        }
        None => {
            let ev = linalg::general_eigenvalues(&ginv.matmul(hbar));
            let (re, im): (Vec<f64>, Vec<f64>) = ev.into_iter().unzip();
            (re, im, Vec::new())
        }
    };

    let radius = kappa
        .iter()
        .zip(&imag)
        .fold(0.0_f64, |m, (r, i)| m.max(math::sqrt(r * r + i * i)));
    let complex_spectrum = imag.iter().any(|&i| !is_zero(i, tol, radius));
    let classification = if definite_sign.is_some() { classify(&kappa, tol) } else { PointClass::IndefiniteMetric };

    let mean = kappa.iter().sum::<f64>() / n as f64;
    let (gk, _) = kappa.iter().zip(&imag).fold((1.0, 0.0), |(ar, ai), (&br, &bi)| (ar * br - ai * bi, ar * bi + ai * br));
    let radii = kappa
        .iter()
        .zip(&imag)
        .filter(|(k, i)| **i == 0.0 && !is_zero(**k, tol, radius))
        .map(|(k, _)| 1.0 / k)
        .collect();

    Ok(CurvatureReport {
        principal_curvatures: kappa,
        imaginary_parts: imag,
        complex_spectrum,
        classification,
        mean_curvature: mean,
        gaussian_curvature: gk,
        radii,
        principal_directions: directions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct NormalCurvature {
    pub kappa_n: f64,
    pub asymptotic: bool,
}

/// `κ_n = −H̄(t, t)` for a unit `t` in frame coordinates.
pub fn normal_curvature_of_direction(hbar: &SquareMatrix, t: &[f64], tol: f64) -> NormalCurvature {
    let q = hbar.bilinear(t, t);
    NormalCurvature { kappa_n: -q, asymptotic: q.abs() < tol }
}

/// Null directions of `H̄` for `n = 2` (Euclidean-unit, frame coordinates).
/// Empty unless the quadratic form is indefinite.
pub fn asymptotic_directions_2d(hbar: &SquareMatrix) -> Vec<[f64; 2]> {
    if hbar.dim() != 2 {
        return Vec::new();
    }
    let (a, b, c) = (hbar[(0, 0)], 0.5 * (hbar[(0, 1)] + hbar[(1, 0)]), hbar[(1, 1)]);
    let disc = b * b - a * c;
    if disc <= 0.0 {
        return Vec::new();
    }
    let s = math::sqrt(disc);
    let raw: [[f64; 2]; 2] = if a.abs() >= c.abs() && a != 0.0 {
        [[-b + s, a], [-b - s, a]]
    } else if c != 0.0 {
        [[c, -b + s], [c, -b - s]]
    } else {
        [[1.0, 0.0], [0.0, 1.0]]
    };
    raw.iter()
        .map(|d| {
            let len = math::norm(d);
            [d[0] / len, d[1] / len]
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OmegaDecomposition {
    /// `ϖ_ab = W(e_a, e_b)`.
    pub varpi: SquareMatrix,
    /// `η_a = W(e_a, N_vec) / g(N, N)`.
    pub eta: Vec<f64>,
}

impl OmegaDecomposition {
    /// `(i_v ϖ)_b = vᵃ ϖ_ab` for `v` in frame coordinates.
    pub fn interior_varpi(&self, v: &[f64]) -> Vec<f64> {
        self.varpi.vec_mul(v)
    }
}

/// Splits `W` into its tangential block and its mixed part so that
/// `W(u, v) = ϖ(u_t, v_t) + η(u_t) N(v) − η(v_t) N(u)`.
pub fn omega_decompose(geom: &PointGeometry, frame: &AdaptedFrame) -> OmegaDecomposition {
    let e = &frame.tangent_basis;
    let varpi = SquareMatrix::from_fn(frame.rank(), |a, b| geom.w.bilinear(&e[a], &e[b]));
    let eta = e.iter().map(|ea| geom.w.bilinear(ea, &geom.n_vec) / geom.signature).collect();
    OmegaDecomposition { varpi, eta }
}

/// Basis of `ker ϖ` in frame coordinates: the tangent directions `v` with
/// `i_v ϖ = 0`.
pub fn varpi_kernel(om: &OmegaDecomposition, tol: f64) -> Vec<Vec<f64>> {
    linalg::null_space(&om.varpi, tol)
}

/// Everything the curvature task reports at one point.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PointCurvature {
    pub x: Vec<f64>,
    pub second_fundamental: SquareMatrix,
    pub restricted_metric_signs: Vec<f64>,
    pub report: CurvatureReport,
    pub frame: AdaptedFrame,
}

pub fn analyze_point(
    field: &CovectorField,
    metric: &MetricSpec,
    x: &[f64],
    mode: DiffMode,
    tol: f64,
) -> Result<PointCurvature> {
    let geom = differential_split(field, metric, x, mode)?;
    let frame = adapted_frame(&geom, metric)?;
    let hbar = second_fundamental_restricted(&geom, &frame);
    let report = curvature_report(&hbar, &frame.restricted_metric(), tol)?;
    Ok(PointCurvature {
        x: x.to_vec(),
        second_fundamental: hbar,
        restricted_metric_signs: frame.signs.clone(),
        report,
        frame,
    })
}
