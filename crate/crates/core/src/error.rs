use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("root finding did not converge: {0}")]
    NonConvergence(String),

    #[error("m = {m} exceeds the exact-integer expansion cap of {cap}")]
    DegreeCap { m: u32, cap: u32 },

    #[error("1/(1 + {u}x + {v}x²) is not the Laplace transform of a positive exponential mixture")]
    NotACompletelyMonotoneQuadratic { u: f64, v: f64 },

    #[error("quadrature tolerance {tol:e} not reached: error estimate {estimate:e} after {evaluations} evaluations")]
    ToleranceNotReached {
        tol: f64,
        estimate: f64,
        evaluations: usize,
    },

    #[error("integrand does not decay: |f(z)|·z >= {threshold:e} up to z = {cutoff:e}")]
    NonDecayingIntegrand { cutoff: f64, threshold: f64 },

    #[error("path did not exit after {max_steps} steps")]
    MaxStepsExceeded { max_steps: u64 },

    #[error("planar path came within {radius:e} of the origin")]
    OriginTooClose { radius: f64 },
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
