use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// Invalid specification: bad dimension, unknown preset, malformed table.
    Config(String),
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    /// The covector vanishes at the evaluation point.
    ZeroForm,
    /// `g⁻¹(N, N)` is (numerically) zero, so `N` cannot be normalized.
    NullNormal {
        norm_sq: f64,
    },
    /// An exterior power that does not exist in this dimension was requested.
    Degree {
        degree: usize,
        dim: usize,
    },
    /// The metric restricted to `Σ_x` has a null direction.
    DegenerateTangentMetric,
    SingularMetric,
    NumericalBlowup {
        step: usize,
    },
    /// Curvature vanishes, so the principal normal is undefined.
    DegenerateCurve,
    EigenvalueCollision {
        step: usize,
    },
    SampleMismatch,
    /// The initial velocity does not satisfy the constraint.
    InitialDrift {
        drift: f64,
    },
}

impl Error {
    /// Stable machine-readable name, used in diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "ConfigError",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::ZeroForm => "ZeroForm",
            Error::NullNormal { .. } => "NullNormal",
            Error::Degree { .. } => "DegreeError",
            Error::DegenerateTangentMetric => "DegenerateTangentMetric",
            Error::SingularMetric => "SingularMetric",
            Error::NumericalBlowup { .. } => "NumericalBlowup",
            Error::DegenerateCurve => "DegenerateCurve",
            Error::EigenvalueCollision { .. } => "EigenvalueCollision",
            Error::SampleMismatch => "SampleMismatch",
            Error::InitialDrift { .. } => "InitialDrift",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::ZeroForm => f.write_str("covector vanishes at the evaluation point"),
            Error::NullNormal { norm_sq } => {
                write!(f, "normal covector is null under the metric (g(N,N) = {norm_sq:e})")
            }
            Error::Degree { degree, dim } => {
                write!(f, "a {degree}-form does not exist in dimension {dim}")
            }
            Error::DegenerateTangentMetric => {
                f.write_str("metric restricted to the hyperplane is degenerate")
            }
            Error::SingularMetric => f.write_str("restricted metric is not invertible"),
            Error::NumericalBlowup { step } => write!(f, "state blew up at step {step}"),
            Error::DegenerateCurve => f.write_str("curvature vanishes, principal normal undefined"),
            Error::EigenvalueCollision { step } => {
                write!(f, "followed eigenvalue collided with another at step {step}")
            }
            Error::SampleMismatch => f.write_str("trajectories have different samples"),
            Error::InitialDrift { drift } => {
                write!(f, "initial velocity violates the constraint (|N(v)| = {drift:e})")
            }
        }
    }
}

impl core::error::Error for Error {}
