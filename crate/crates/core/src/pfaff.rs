//! Integrability class of a Pfaff equation `N = 0`.
//!
//! The sequence `d∧N, N∧d∧N, (d∧N)², N∧(d∧N)², …` is evaluated up to the
//! ambient dimension. The number of nonvanishing members of the form
//! `N∧(d∧N)ᵐ` with `m ≥ 1` is the number of `μ dν` pairs in the Darboux
//! normal form `N = dφ + Σ μᵢ dνᵢ`, and the degree of integrability is
//! `dim − 1 − pairs`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::forms::{differential_split, AltTensor, CovectorField, DiffMode, MetricSpec, PointGeometry};
use crate::grid::GridSpec;
use crate::{Error, Result};

pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

/// `N∧d∧N`, components `N_iW_jk + N_jW_ki + N_kW_ij` on `i < j < k`.
pub fn frobenius_three_form(geom: &PointGeometry) -> Result<AltTensor> {
    let dim = geom.dim();
    if dim < 3 {
        return Err(Error::Degree { degree: 3, dim });
    }
    geom.one_form().wedge(&geom.two_form())
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SequenceEntry {
    pub label: String,
    pub degree: usize,
    /// Frobenius norm of the canonical components.
    pub norm: f64,
    pub max_abs: f64,
    pub vanishes: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IntegrabilityReport {
    pub point: Vec<f64>,
    pub sequence_norms: Vec<SequenceEntry>,
    pub pair_count: usize,
    pub degree_of_integrability: usize,
    pub completely_integrable: bool,
}

fn label(degree: usize) -> String {
    let m = degree / 2;
    let power = if m == 1 { String::from("dN") } else { alloc::format!("dN^{m}") };
    if degree.is_multiple_of(2) {
        power
    } else {
        alloc::format!("N^{power}")
    }
}

/// Vanishing threshold for a `degree`-form given the size of `d∧N`.
pub fn vanishing_threshold(tol: f64, dn_max_abs: f64, degree: usize) -> f64 {
    let scale = dn_max_abs.max(1.0);
    tol * crate::math::powi(scale, degree.div_ceil(2) as u32)
}

/// Wedge sequence and pair count from an already evaluated point.
pub fn integrability_from_geometry(geom: &PointGeometry, tol: f64) -> Result<IntegrabilityReport> {
    let dim = geom.dim();
    let n = geom.one_form();
    let dn = geom.two_form();
    let dn_scale = dn.max_abs();

    let mut sequence = Vec::new();
    let mut pair_count = 0;
    let mut counting = true;
    let mut power = dn.clone();
    let mut m = 1;
    loop {
        let even_degree = 2 * m;
        if even_degree > dim {
            break;
        }
        let entry = |t: &AltTensor, degree: usize| {
            let max_abs = t.max_abs();
            SequenceEntry {
                label: label(degree),
                degree,
                norm: t.frobenius_norm(),
                max_abs,
                vanishes: max_abs < vanishing_threshold(tol, dn_scale, degree),
            }
        };
        sequence.push(entry(&power, even_degree));
        if even_degree < dim {
            let odd = n.wedge(&power)?;
            let e = entry(&odd, even_degree + 1);
            if counting {
                if e.vanishes {
                    counting = false;
                } else {
                    pair_count += 1;
                }
            }
            sequence.push(e);
        }
        if 2 * (m + 1) > dim {
            break;
        }
        power = power.wedge(&dn)?;
        m += 1;
    }
    let degree = dim - 1 - pair_count;
    Ok(IntegrabilityReport {
        point: geom.x.clone(),
        sequence_norms: sequence,
        pair_count,
        degree_of_integrability: degree,
        completely_integrable: pair_count == 0,
    })
}

/// Integrability class of `N = 0` at `x`, using the analytic derivative.
pub fn integrability_class_at_point(
    field: &CovectorField,
    metric: &MetricSpec,
    x: &[f64],
    tol: f64,
) -> Result<IntegrabilityReport> {
    let geom = differential_split(field, metric, x, DiffMode::Analytic)?;
    integrability_from_geometry(&geom, tol)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ExceptionalPoint {
    pub index: usize,
    pub point: Vec<f64>,
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct NormRange {
    pub min: f64,
    pub max: f64,
}

/// Aggregate of per-point reports over a grid.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RegionReport {
    pub total_points: usize,
    pub classified_points: usize,
    pub degree_histogram: BTreeMap<usize, usize>,
    pub sequence_norm_ranges: BTreeMap<String, NormRange>,
    pub exceptional_points: Vec<ExceptionalPoint>,
    pub majority_degree: Option<usize>,
}

impl RegionReport {
    /// Folds per-point outcomes, taken in grid order.
    pub fn from_results<I>(results: I) -> Self
    where
        I: IntoIterator<Item = (Vec<f64>, Result<IntegrabilityReport>)>,
    {
        let mut out = RegionReport::default();
        for (index, (point, res)) in results.into_iter().enumerate() {
            out.total_points += 1;
            match res {
                Ok(rep) => {
                    out.classified_points += 1;
                    *out.degree_histogram.entry(rep.degree_of_integrability).or_insert(0) += 1;
                    for e in rep.sequence_norms {
                        out.sequence_norm_ranges
                            .entry(e.label)
                            .and_modify(|r| {
                                r.min = r.min.min(e.norm);
                                r.max = r.max.max(e.norm);
                            })
                            .or_insert(NormRange { min: e.norm, max: e.norm });
                    }
                }
                Err(err) => out.exceptional_points.push(ExceptionalPoint {
                    index,
                    point,
                    kind: String::from(err.kind()),
                    message: alloc::format!("{err}"),
                }),
            }
        }
        // ties resolve to the smaller degree
        out.majority_degree = out
            .degree_histogram
            .iter()
            .fold(None, |best: Option<(usize, usize)>, (&d, &c)| match best {
                Some((_, bc)) if bc >= c => best,
                _ => Some((d, c)),
            })
            .map(|(d, _)| d);
        out
    }
}

/// Classifies every grid point sequentially.
pub fn classify_region(field: &CovectorField, metric: &MetricSpec, grid: &GridSpec, tol: f64) -> Result<RegionReport> {
    if grid.dim() != field.dim() {
        return Err(Error::DimensionMismatch { expected: field.dim(), found: grid.dim() });
    }
    grid.validate()?;
    Ok(RegionReport::from_results(grid.points().map(|x| {
        let r = integrability_class_at_point(field, metric, &x, tol);
        (x, r)
    })))
}
