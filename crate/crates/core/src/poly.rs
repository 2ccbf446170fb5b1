//! Multivariate polynomials with real coefficients, the representation
//! behind every covector field in this crate.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Monomial {
    pub coeff: f64,
    pub exponents: Vec<u32>,
}

impl Monomial {
    pub fn new(coeff: f64, exponents: Vec<u32>) -> Self {
        Self { coeff, exponents }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = self.coeff;
        for (xi, &e) in x.iter().zip(&self.exponents) {
            if e != 0 {
                acc *= crate::math::powi(*xi, e);
            }
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Polynomial {
    dim: usize,
    terms: Vec<Monomial>,
}

impl Polynomial {
    /// Builds a polynomial in `dim` variables, checking every exponent
    /// vector has length `dim`.
    pub fn new(dim: usize, terms: Vec<Monomial>) -> Result<Self> {
        for (k, t) in terms.iter().enumerate() {
            if t.exponents.len() != dim {
                return Err(Error::Config(alloc::format!(
                    "term {k} has {} exponents, expected {dim}",
                    t.exponents.len()
                )));
            }
            if !t.coeff.is_finite() {
                return Err(Error::Config(alloc::format!("term {k} has a non-finite coefficient")));
            }
        }
        Ok(Self { dim, terms })
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: Vec::new() }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self { dim, terms: vec![Monomial::new(c, vec![0; dim])] }
    }

    /// `c · x_i`.
    pub fn linear(dim: usize, i: usize, c: f64) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Self { dim, terms: vec![Monomial::new(c, e)] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn partial(&self, i: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.exponents[i] > 0)
            .map(|t| {
                let mut e = t.exponents.clone();
                let p = e[i];
                e[i] -= 1;
                Monomial::new(t.coeff * p as f64, e)
            })
            .collect();
        Self { dim: self.dim, terms }
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.dim).map(|i| self.partial(i)).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self { dim: self.dim, terms }
    }

    pub fn scale(&self, c: f64) -> Self {
        let terms = self.terms.iter().map(|t| Monomial::new(t.coeff * c, t.exponents.clone())).collect();
        Self { dim: self.dim, terms }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let e = a.exponents.iter().zip(&b.exponents).map(|(p, q)| p + q).collect();
                terms.push(Monomial::new(a.coeff * b.coeff, e));
            }
        }
        Self { dim: self.dim, terms }
    }

    /// Same polynomial in `dim + extra` variables; the new variables are
    /// appended and do not occur.
    pub fn extend_vars(&self, extra: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut e = t.exponents.clone();
                e.extend(core::iter::repeat_n(0, extra));
                Monomial::new(t.coeff, e)
            })
            .collect();
        Self { dim: self.dim + extra, terms }
    }

    /// True when some term depends on variable `i`.
    pub fn depends_on(&self, i: usize) -> bool {
        self.terms.iter().any(|t| t.exponents[i] > 0 && t.coeff != 0.0)
    }
}
