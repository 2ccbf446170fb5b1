//! Pfaffian 1-forms on flat space and the geometry of the hyperplane fields
//! they define.
//!
//! A nowhere-vanishing covector field `N` on ℝᵈ defines a hyperplane `Σ_x`
//! at every point by `N(v) = 0`. When `N ∧ d∧N ≠ 0` there is no family of
//! hypersurfaces tangent to those hyperplanes; the field is then a
//! *pseudo-hypersurface*. This crate evaluates such fields, classifies their
//! degree of integrability, computes the induced first and second
//! fundamental forms, and integrates curves constrained to `Σ`: normal
//! curves, lines of curvature and non-holonomically constrained geodesics.
//! The [`em`] module builds the bundle 1-form `A + dφ` of an electromagnetic
//! potential and integrates its constrained geodesics next to the Lorentz
//! force equation.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
mod linalg;
mod math;

pub mod curves;
pub mod em;
pub mod forms;
pub mod geometry;
pub mod grid;
pub mod pfaff;
pub mod poly;

pub use error::{Error, Result};
pub use linalg::SquareMatrix;
