use thiserror::Error;

/// Principal axis of an ellipsoid in its body frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("quadrature did not converge: estimate {estimate:e}, error estimate {error:e} after {intervals} subintervals")]
    QuadratureFailure {
        estimate: f64,
        error: f64,
        intervals: usize,
    },

    #[error("polarizability resonance on axis {axis}: depolarization denominator vanishes")]
    Resonance { axis: Axis },

    #[error("tensor is not axisymmetric about Z: A_XX = {a_xx:e}, A_YY = {a_yy:e}")]
    NotAxisymmetric { a_xx: f64, a_yy: f64 },

    #[error("field point coincides with the dipole")]
    Singularity,

    #[error("internal consistency check failed: residual {residual:e} exceeds {tolerance:e}")]
    Consistency { residual: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        name,
        reason: reason.into(),
    }
}
