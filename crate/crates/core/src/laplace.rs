//! Closed-form Laplace transforms `φ_m`, `φ̃_m` and their factorization into
//! exponential mixtures.
//!
//! For integer `m`, `φ_m(x) = 1 / T_m(sqrt(1 + x))` factors over the positive
//! zeros of `T_m`:
//!
//! * `m = 2n + 1`: `φ_m(x) = (1 + x)^{-1/2} · Π_k 1 / (1 + a_k x)`,
//! * `m = 2n`: `φ_m(x) = Π_k 1 / (1 + b_k x)`,
//!
//! with `a_k, b_k = 1 / sin²(π (2k − 1) / (2m))`. The same products are the
//! integer polynomials `P_n`, `Q_n` expanded by [`pq_polynomial`].
//!
//! Non-integer `m` is accepted by [`phi`] and [`phi_tilde`] through the cosh
//! form of `T_m`; whether those are still Laplace transforms of infinitely
//! divisible laws is open, so only the integer case has a [`FactorizedLaw`].

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::poly::{log_chebyshev_t, Polynomial};

/// Largest `m` for which [`pq_polynomial`] expands coefficients exactly.
pub const PQ_DEGREE_CAP: u32 = 60;

/// Which of the two infinitely divisible variables is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LawVariant {
    /// `K`, with Laplace transform `φ_m`.
    K,
    /// `K̃ = N²/2 + K`, with Laplace transform `φ̃_m`.
    KTilde,
}

/// A law of the form `[N²/2] + Σ c_k · E_k` with `E_k` i.i.d. unit exponentials.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizedLaw {
    m: u32,
    variant: LawVariant,
    has_half_gaussian: bool,
    exp_scales: Vec<f64>,
}

impl FactorizedLaw {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn variant(&self) -> LawVariant {
        self.variant
    }

    /// Whether an independent `N²/2` (a Gamma(1/2, 1) variable) is present.
    pub fn has_half_gaussian(&self) -> bool {
        self.has_half_gaussian
    }

    /// Scales `c_k` of the exponential components, largest first.
    pub fn exp_scales(&self) -> &[f64] {
        &self.exp_scales
    }

    pub fn mean(&self) -> f64 {
        let gauss = if self.has_half_gaussian { 0.5 } else { 0.0 };
        gauss + self.exp_scales.iter().sum::<f64>()
    }

    /// `E[exp(−x · L)] = (1 + x)^{−1/2 · [half-Gaussian]} · Π 1 / (1 + c_k x)`.
    pub fn laplace(&self, x: f64) -> f64 {
        let gauss = if self.has_half_gaussian {
            (1.0 + x).sqrt().recip()
        } else {
            1.0
        };
        self.exp_scales
            .iter()
            .fold(gauss, |acc, &c| acc / c.mul_add(x, 1.0))
    }
}

/// `(G₊(x), G₋(x)) = (sqrt(1 + x) + sqrt(x), sqrt(1 + x) − sqrt(x))`.
///
/// `G₋` is returned as `1 / G₊` (their product is identically one) to avoid
/// cancellation for large `x`.
pub fn g_plus_minus(x: f64) -> Result<(f64, f64)> {
    check_x(x)?;
    let gp = (1.0 + x).sqrt() + x.sqrt();
    Ok((gp, gp.recip()))
}

fn check_x(x: f64) -> Result<()> {
    if x >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("transform argument must be >= 0, got {x}")))
    }
}

fn check_m(m: f64) -> Result<()> {
    if m > 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("m must be finite and > 0, got {m}")))
    }
}

/// `log φ_m(x) = −log T_m(sqrt(1 + x))`.
pub fn log_phi(m: f64, x: f64) -> Result<f64> {
    check_m(m)?;
    check_x(x)?;
    Ok(-log_chebyshev_t(m, (1.0 + x).sqrt())?)
}

/// `φ_m(x) = 2 / (G₊(x)^m + G₋(x)^m)`, evaluated as `exp(−log T_m(sqrt(1 + x)))`.
pub fn phi(m: f64, x: f64) -> Result<f64> {
    Ok(log_phi(m, x)?.exp())
}

/// `log φ̃_m(x) = log φ_m(x) − log(1 + x) / 2`.
pub fn log_phi_tilde(m: f64, x: f64) -> Result<f64> {
    Ok(log_phi(m, x)? - 0.5 * x.ln_1p())
}

/// `φ̃_m(x) = φ_m(x) / sqrt(1 + x)`, the Gauss-Laplace transform of the cone
/// exit time with `m = π / (2c)`.
pub fn phi_tilde(m: f64, x: f64) -> Result<f64> {
    Ok(log_phi_tilde(m, x)?.exp())
}

fn check_integer_m(m: u32) -> Result<()> {
    if m == 0 {
        Err(domain("m must be a positive integer"))
    } else {
        Ok(())
    }
}

/// Exact integer coefficients of `P_n` (`m = 2n + 1`) or `Q_n` (`m = 2n`),
/// ascending:
///
/// ```text
/// P_n(x) = Σ_k C(2n+1, 2k+1) (1 + x)^k x^{n−k},
/// Q_n(x) = Σ_k C(2n,   2k)   (1 + x)^k x^{n−k}.
/// ```
pub fn pq_coefficients(m: u32) -> Result<Vec<u128>> {
    check_integer_m(m)?;
    if m > PQ_DEGREE_CAP {
        return Err(Error::DegreeCap {
            m,
            cap: PQ_DEGREE_CAP,
        });
    }
    let n = (m / 2) as usize;
    let odd = m % 2 == 1;
    let row = binomial_row(m as usize);

    let overflow = || Error::DegreeCap {
        m,
        cap: PQ_DEGREE_CAP,
    };
    let mut coeffs = vec![0u128; n + 1];
    for k in 0..=n {
        let outer = row[if odd { 2 * k + 1 } else { 2 * k }];
        // (1 + x)^k x^{n−k} contributes C(k, i) to x^{n−k+i}.
        let inner = binomial_row(k);
        for (i, &b) in inner.iter().enumerate() {
            let term = outer.checked_mul(b).ok_or_else(overflow)?;
            let slot = &mut coeffs[n - k + i];
            *slot = slot.checked_add(term).ok_or_else(overflow)?;
        }
    }
    Ok(coeffs)
}

fn binomial_row(n: usize) -> Vec<u128> {
    let mut row = vec![1u128; n + 1];
    for k in 1..n {
        row[k] = row[k - 1] * (n + 1 - k) as u128 / k as u128;
    }
    row
}

/// `P_n` or `Q_n` as a [`Polynomial`]; `φ_m(x) = 1 / D_m(x)` with
/// `D_m = sqrt(1 + x) P_n` (odd `m`) or `D_m = Q_n` (even `m`).
///
/// Coefficients are exact integers; above `m ≈ 40` the larger ones exceed
/// 2^53 and are rounded on conversion to `f64`.
pub fn pq_polynomial(m: u32) -> Result<Polynomial> {
    Ok(Polynomial::new(
        pq_coefficients(m)?.into_iter().map(|c| c as f64).collect(),
    ))
}

/// Scales from the positive zeros of `T_m`: `1 / sin²(π (2k − 1) / (2m))`
/// for `k = 1..⌊m/2⌋`, in decreasing order. These are the `a_k` for odd `m`
/// and the `b_k` for even `m`.
pub fn spectral_scales(m: u32) -> Vec<f64> {
    let n = m / 2;
    let denom = 2.0 * m as f64;
    (1..=n)
        .map(|k| {
            let s = (PI * (2 * k - 1) as f64 / denom).sin();
            (s * s).recip()
        })
        .collect()
}

/// The exponential-mixture law whose Laplace transform is `φ_m` (variant
/// [`LawVariant::K`]) or `φ̃_m` ([`LawVariant::KTilde`]).
///
/// For odd `m`, the two half-Gaussians of `K̃ = N²/2 + K` merge into one unit
/// exponential, so `K̃` has scales `(1, a_1, …, a_n)` and no Gaussian part.
pub fn factorize(m: u32, variant: LawVariant) -> Result<FactorizedLaw> {
    check_integer_m(m)?;
    let scales = spectral_scales(m);
    let odd = m % 2 == 1;
    let (has_half_gaussian, exp_scales) = match (variant, odd) {
        (LawVariant::K, true) => (true, scales),
        (LawVariant::K, false) => (false, scales),
        (LawVariant::KTilde, true) => {
            let mut s = scales;
            s.push(1.0);
            (false, s)
        }
        (LawVariant::KTilde, false) => (true, scales),
    };
    Ok(FactorizedLaw {
        m,
        variant,
        has_half_gaussian,
        exp_scales,
    })
}

/// Laplace transform of a factorized law at `x >= 0`.
pub fn laplace_of_law(law: &FactorizedLaw, x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(law.laplace(x))
}

/// Splits `1 + u x + v x²` as `(1 + a x)(1 + b x)` with `0 < a <= b`.
///
/// This succeeds exactly when `u > 0`, `v > 0` and `u² − 4v >= 0` (up to
/// rounding of a repeated factor), which is
/// when `1 / (1 + u x + v x²)` is the Laplace transform of `a E + b E'`.
pub fn quadratic_factor(u: f64, v: f64) -> Result<(f64, f64)> {
    let disc = u.mul_add(u, -4.0 * v);
    // A repeated factor (a = b) computes Δ as ±O(ε u²).
    let rounding = 8.0 * f64::EPSILON * u * u;
    if !(u > 0.0 && v > 0.0 && disc >= -rounding) {
        return Err(Error::NotACompletelyMonotoneQuadratic { u, v });
    }
    let disc = disc.max(0.0);
    let big = 0.5 * (u + disc.sqrt());
    // a = (u − sqrt Δ)/2 rewritten as v / b to avoid cancellation.
    Ok((v / big, big))
}
