use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

pub const MAX_GRID_POINTS: usize = 1_000_000;

/// Axis-aligned tensor grid: `samples_per_axis` points per axis spanning
/// `center ± half_width`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GridSpec {
    pub center: Vec<f64>,
    pub half_width: f64,
    pub samples_per_axis: usize,
}

impl GridSpec {
    pub fn new(center: Vec<f64>, half_width: f64, samples_per_axis: usize) -> Result<Self> {
        let g = Self { center, half_width, samples_per_axis };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples_per_axis == 0 {
            return Err(Error::Config("samples_per_axis must be at least 1".into()));
        }
        if !(self.half_width.is_finite() && self.half_width >= 0.0) {
            return Err(Error::Config("half_width must be finite and non-negative".into()));
        }
        if self.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Config("grid center must be finite".into()));
        }
        let total = self.checked_len();
        match total {
            Some(n) if n <= MAX_GRID_POINTS => Ok(()),
            _ => Err(Error::Config(format!("grid exceeds {MAX_GRID_POINTS} points"))),
        }
    }

    fn checked_len(&self) -> Option<usize> {
        self.center.iter().try_fold(1usize, |acc, _| acc.checked_mul(self.samples_per_axis))
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn len(&self) -> usize {
        self.checked_len().unwrap_or(usize::MAX)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn coordinate(&self, axis: usize, i: usize) -> f64 {
        let m = self.samples_per_axis;
        if m == 1 {
            return self.center[axis];
        }
        // symmetric numerator keeps the middle sample exactly on the center
        let t = (2 * i) as f64 - (m - 1) as f64;
        self.center[axis] + self.half_width * t / (m - 1) as f64
    }

    /// Point number `k` in lexicographic order, last axis fastest.
    pub fn point(&self, mut k: usize) -> Vec<f64> {
        let d = self.dim();
        let m = self.samples_per_axis;
        let mut x = alloc::vec![0.0; d];
        for axis in (0..d).rev() {
            x[axis] = self.coordinate(axis, k % m);
            k /= m;
        }
        x
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |k| self.point(k))
    }
}
