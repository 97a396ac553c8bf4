//! Numerics for the exit time of planar Brownian motion from a cone.
//!
//! Planar Brownian motion started at `(1, 0)` winds around the origin; the
//! first time its continuous winding angle reaches `±c` is the cone exit time
//! `T_c`. With `m = π / (2c)`, the Gauss-Laplace transform of `T_c` is
//!
//! ```text
//! E[ sqrt(2c² / (π T_c)) · exp(-x / (2 T_c)) ] = φ_m(x) / sqrt(1 + x),
//! φ_m(x) = 2 / (G₊(x)^m + G₋(x)^m),   G±(x) = sqrt(1 + x) ± sqrt(x).
//! ```
//!
//! The crate is split by concern:
//!
//! * [`poly`]: dense polynomials, Chebyshev `T_m` on `[1, ∞)`, real root isolation.
//! * [`laplace`]: `φ_m`, `φ̃_m`, the integer polynomials `P_n`/`Q_n`, the
//!   exponential scales from Chebyshev zeros, and the factorized laws `K`, `K̃`.
//! * [`quad`]: adaptive Gauss-Kronrod quadrature and the arcsine Laplace transform.
//! * [`levy`]: Lévy densities, the Frullani exponent, the arcsine Thorin
//!   exponent and the small-angle asymptotics.
//! * [`mc`]: seeded samplers, path simulators for `T_c`, and estimators.

// NaN must fail every domain check, so `!(x > 0.0)` is used on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod laplace;
pub mod levy;
pub mod mc;
pub mod poly;
pub mod quad;

pub use error::{Error, Result};
pub use laplace::{FactorizedLaw, LawVariant};
pub use mc::{MCEstimate, PathConfig};
pub use poly::Polynomial;
pub use quad::QuadratureResult;
