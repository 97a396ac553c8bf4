//! Lévy and Thorin measures of the factorized laws, and the small-angle limit.
//!
//! `Π 1/(1 + c_k x)` is the Laplace transform of `Σ c_k E_k`, whose Lévy
//! measure has density `(1/z) Σ exp(−z / c_k)`. By Frullani,
//!
//! ```text
//! log(1 + c x) = ∫_0^∞ (1 − e^{−xz}) e^{−z/c} dz / z.
//! ```
//!
//! The half-Gaussian `N²/2` is a Gamma(1/2, 1) variable and gets the Lévy
//! density `e^{−z} / (2z)`; that extension is ours and keeps [`levy_density`]
//! total over both `K` and `K̃`.
//!
//! Normalizing the exponent by `n` and letting `n → ∞` yields a generalized
//! Gamma convolution whose Thorin measure is the arcsine law, with exponent
//! `2 log(sqrt(1 + x) + sqrt(x))`.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2};

use crate::error::{domain, Result};
use crate::laplace::{log_phi_tilde, spectral_scales, FactorizedLaw};
use crate::quad::{
    arcsine_laplace, integrate, integrate_semi_infinite, integrate_with_breaks, QuadratureResult,
};

/// Lévy density `z ↦ (1/z) (Σ_i exp(−z · rate_i) + [half-Gaussian] · exp(−z)/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SumExpLevyDensity {
    rates: Vec<f64>,
    half_gaussian: bool,
}

impl SumExpLevyDensity {
    pub fn from_law(law: &FactorizedLaw) -> Self {
        Self {
            rates: law.exp_scales().iter().map(|c| c.recip()).collect(),
            half_gaussian: law.has_half_gaussian(),
        }
    }

    /// Rates `1 / c_k` of the exponential components.
    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn has_half_gaussian(&self) -> bool {
        self.half_gaussian
    }

    /// `z · ν(z)`, finite at `z = 0`.
    fn z_density(&self, z: f64) -> f64 {
        let gauss = if self.half_gaussian {
            0.5 * (-z).exp()
        } else {
            0.0
        };
        self.rates.iter().map(|r| (-z * r).exp()).sum::<f64>() + gauss
    }

    pub fn density(&self, z: f64) -> Result<f64> {
        if !(z > 0.0) {
            return Err(domain(format!("Lévy density needs z > 0, got {z}")));
        }
        Ok(self.z_density(z) / z)
    }

    /// `∫ min(1, z) ν(dz)`, which is finite for every law in this family.
    pub fn min_one_moment(&self, tol: f64) -> Result<f64> {
        let near = integrate(|z| self.z_density(z), 0.0, 1.0, 0.5 * tol)?;
        let far = integrate_semi_infinite(|t| self.z_density(1.0 + t) / (1.0 + t), 0.5 * tol)?;
        Ok(near.value + far.value)
    }

    /// `∫ (1 − e^{−xz}) ν(dz)` by quadrature.
    pub fn exponent_integral(&self, x: f64, tol: f64) -> Result<QuadratureResult> {
        check_x(x)?;
        if x == 0.0 {
            return Ok(QuadratureResult {
                value: 0.0,
                error_estimate: 0.0,
                evaluations: 0,
            });
        }
        integrate_semi_infinite(
            |z| {
                // (1 − e^{−xz}) / z → x as z → 0.
                let damp = if z == 0.0 { x } else { -(-x * z).exp_m1() / z };
                damp * self.z_density(z)
            },
            tol,
        )
    }
}

fn check_x(x: f64) -> Result<()> {
    if x >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("exponent argument must be >= 0, got {x}")))
    }
}

/// Lévy density of `law` at `z > 0`.
pub fn levy_density(law: &FactorizedLaw, z: f64) -> Result<f64> {
    SumExpLevyDensity::from_law(law).density(z)
}

/// `Σ log(1 + c_k x) + [half-Gaussian] · log(1 + x) / 2`, so that
/// `exp(−exponent)` is the law's Laplace transform.
pub fn laplace_exponent_series(law: &FactorizedLaw, x: f64) -> Result<f64> {
    check_x(x)?;
    let gauss = if law.has_half_gaussian() {
        0.5 * x.ln_1p()
    } else {
        0.0
    };
    Ok(law
        .exp_scales()
        .iter()
        .map(|c| (c * x).ln_1p())
        .sum::<f64>()
        + gauss)
}

/// `∫_0^∞ (1 − e^{−xz}) ν(z) dz` evaluated numerically; equal to
/// [`laplace_exponent_series`] by the Frullani identity.
pub fn laplace_exponent_integral(
    law: &FactorizedLaw,
    x: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    SumExpLevyDensity::from_law(law).exponent_integral(x, tol)
}

/// Exponent of the arcsine generalized Gamma convolution,
///
/// ```text
/// ∫_0^∞ (1 − e^{−xz}) μ₊(z) dz / z,   μ₊(z) = E[exp(−z G)],  G ~ arcsine on [0, 1],
/// ```
///
/// which should equal `2 log(sqrt(1 + x) + sqrt(x))`.
///
/// `μ₊(z)` decays only like `(πz)^{−1/2}`, so the integral is taken in
/// `s = log z`, where the integrand decays exponentially at both ends:
/// below `s_lo` it is at most `x e^s`, above `s_hi` at most `e^{−s/2}`
/// (using `sqrt(z) μ₊(z) <= 1`).
pub fn thorin_exponent(x: f64, tol: f64) -> Result<f64> {
    check_x(x)?;
    if !(tol > 0.0) {
        return Err(domain(format!("tolerance must be positive, got {tol}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let tail = tol / 10.0;
    let s_lo = (tail / x).ln().min(-1.0);
    let s_hi = 2.0 * (2.0 / tail).ln();
    let inner_tol = (tol * 1e-3).max(1e-15);

    let failure = std::cell::Cell::new(None);
    let integrand = |s: f64| {
        let z = s.exp();
        match arcsine_laplace(z, inner_tol) {
            Ok(mu) => -(-x * z).exp_m1() * mu,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    };
    let step = 4.0;
    let mut points = vec![s_lo];
    let mut s = s_lo.ceil();
    while s < s_hi {
        if s > s_lo {
            points.push(s);
        }
        s += step;
    }
    points.push(s_hi);
    let res = integrate_with_breaks(integrand, &points, 0.8 * tol)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(res.value)
}

/// `2 log G₊(x) = 2 asinh(sqrt x)`, the closed form of [`thorin_exponent`].
pub fn thorin_exponent_closed_form(x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(2.0 * x.sqrt().asinh())
}

/// `E[|log G|]` for `G` arcsine on `[0, 1]`, the first integrability condition
/// of a Thorin measure. The second, `∫_{[1,∞)} μ(dh)/h`, is zero because the
/// arcsine law has no mass above 1. Exact value: `2 log 2`.
pub fn arcsine_log_moment(tol: f64) -> Result<f64> {
    // h = sin²v turns the arcsine density into (2/π) dv on [0, π/2].
    let res = integrate_with_breaks(
        |v: f64| -2.0 * v.sin().ln(),
        &[0.0, 1e-3, 0.1, FRAC_PI_2],
        tol / FRAC_2_PI,
    )?;
    Ok(FRAC_2_PI * res.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// `m = 2n + 1`, scales `a_k`.
    Odd,
    /// `m = 2n`, scales `b_k`.
    Even,
}

/// `(1/n) Σ_{k=1}^n log(1 + c_k x)`: the exponent of `(Π 1/(1 + c_k x))^{1/n}`,
/// which tends to [`thorin_exponent`] for either parity.
pub fn ggc_limit_exponent(parity: Parity, n: u32, x: f64) -> Result<f64> {
    check_x(x)?;
    if n == 0 {
        return Err(domain("n must be >= 1"));
    }
    let m = match parity {
        Parity::Odd => 2 * n + 1,
        Parity::Even => 2 * n,
    };
    let sum: f64 = spectral_scales(m).iter().map(|c| (c * x).ln_1p()).sum();
    Ok(sum / n as f64)
}

fn check_cone(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(domain(format!(
            "cone half-angle must be finite and > 0, got {c}"
        )))
    }
}

/// `G₊(x)^{−π/(2c)}`, the Laplace transform of the arcsine-Thorin subordinator
/// at time `π/(4c)`.
pub fn asymptotic_limit(x: f64, c: f64) -> Result<f64> {
    check_x(x)?;
    check_cone(c)?;
    Ok((-FRAC_PI_2 / c * x.sqrt().asinh()).exp())
}

/// `φ̃_m(x)^ε` with `m = π/(2cε)`, evaluated in log space with real `m`.
///
/// This is the Gauss-Laplace transform of the exit time from the cone of
/// half-angle `cε`, raised to the power `ε`; it tends to
/// [`asymptotic_limit`]`(x, c)` with error `O(ε)`.
pub fn asymptotic_check(x: f64, c: f64, epsilon: f64) -> Result<f64> {
    check_x(x)?;
    check_cone(c)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(domain(format!(
            "epsilon must be finite and > 0, got {epsilon}"
        )));
    }
    let m = FRAC_PI_2 / (c * epsilon);
    Ok((epsilon * log_phi_tilde(m, x)?).exp())
}
