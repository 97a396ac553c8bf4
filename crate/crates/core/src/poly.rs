//! Dense real polynomials and the first-kind Chebyshev polynomial on `[1, ∞)`.

use std::f64::consts::LN_2;

use crate::error::{domain, Error, Result};

/// Bisection/Newton steps allowed per isolated root.
const ROOT_ITERATION_CAP: usize = 400;

/// Real polynomial with coefficients in ascending degree order.
///
/// Trailing zeros are stripped on construction; the zero polynomial is stored
/// as the single coefficient `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    /// Monic-times-`lead` expansion of `lead · Π (x − r_i)`.
    pub fn from_roots(roots: &[f64], lead: f64) -> Self {
        let mut coeffs = vec![lead];
        for &r in roots {
            let mut next = vec![0.0; coeffs.len() + 1];
            for (j, &c) in coeffs.iter().enumerate() {
                next[j + 1] += c;
                next[j] -= r * c;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[self.degree()]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    /// Horner evaluation of `Σ coeffs[j] · x^j`.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc.mul_add(x, c))
    }

    /// Compensated Horner evaluation (Graillat, Langlois & Louvet).
    ///
    /// The result is as accurate as Horner run in twice the working precision,
    /// which matters near the clustered roots of high-degree Chebyshev-type
    /// polynomials where plain Horner loses most of its digits.
    pub fn eval_compensated(&self, x: f64) -> f64 {
        let n = self.degree();
        let mut s = self.coeffs[n];
        let mut err = 0.0f64;
        for &c in self.coeffs[..n].iter().rev() {
            let (p, pi) = two_prod(s, x);
            let (next, sigma) = two_sum(p, c);
            s = next;
            err = err.mul_add(x, pi + sigma);
        }
        s + err
    }

    /// `Σ |coeffs[j]| · |x|^j`, the scale against which evaluation residuals are judged.
    pub fn abs_scale(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * ax + c.abs())
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::new(vec![0.0]);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, &c)| j as f64 * c)
                .collect(),
        )
    }

    /// Sorted real roots.
    ///
    /// Roots are isolated between consecutive real critical points (found by
    /// recursing on the derivative), so every simple real root is located and
    /// then refined by safeguarded Newton inside its sign-change bracket.
    /// Critical points where `p` vanishes to working precision are reported as
    /// (multiple) roots. Every returned root satisfies `|p(r)| <= tol · Σ|c_j||r|^j`.
    pub fn real_roots(&self, tol: f64) -> Result<Vec<f64>> {
        if !(tol > 0.0) {
            return Err(domain(format!(
                "root tolerance must be positive, got {tol}"
            )));
        }
        if self.is_zero() {
            return Err(domain("the zero polynomial has no isolated roots"));
        }
        match self.degree() {
            0 => return Ok(Vec::new()),
            1 => return Ok(vec![-self.coeffs[0] / self.coeffs[1]]),
            _ => {}
        }

        let lead = self.leading();
        let bound = 1.0
            + self.coeffs[..self.degree()]
                .iter()
                .map(|c| (c / lead).abs())
                .fold(0.0, f64::max);

        let critical = self.derivative().real_roots(tol)?;
        let mut knots = Vec::with_capacity(critical.len() + 2);
        knots.push(-bound);
        knots.extend(critical.into_iter().filter(|c| c.abs() < bound));
        knots.push(bound);
        knots.dedup();

        // p is monotone between consecutive knots, so each gap holds at most
        // one root, and none at all next to a critical point that is a root.
        let deriv = self.derivative();
        let values: Vec<f64> = knots.iter().map(|&k| self.eval_compensated(k)).collect();
        let last = knots.len() - 1;
        // A critical point that is also a root is only located to O(ε), so its
        // residual is O(ε²) relative to the evaluation scale.
        let n = self.degree() as f64;
        let double_root_tol = 16.0 * n * n * f64::EPSILON * f64::EPSILON;
        let root_knot: Vec<bool> = knots
            .iter()
            .zip(&values)
            .enumerate()
            .map(|(i, (&k, &v))| {
                v == 0.0 || (i > 0 && i < last && v.abs() <= double_root_tol * self.abs_scale(k))
            })
            .collect();

        let mut roots = Vec::with_capacity(self.degree());
        for i in 0..last {
            if root_knot[i] {
                roots.push(knots[i]);
                continue;
            }
            if root_knot[i + 1] || values[i].signum() == values[i + 1].signum() {
                continue;
            }
            roots.push(self.refine(&deriv, knots[i], knots[i + 1], values[i])?);
        }
        if root_knot[last] {
            roots.push(knots[last]);
        }

        for &r in &roots {
            let residual = self.eval_compensated(r).abs();
            if residual > tol * self.abs_scale(r).max(f64::MIN_POSITIVE) {
                return Err(Error::NonConvergence(format!(
                    "residual {residual:e} at root {r} exceeds tolerance {tol:e}"
                )));
            }
        }
        roots.sort_by(f64::total_cmp);
        roots.dedup();
        Ok(roots)
    }

    fn refine(&self, deriv: &Polynomial, mut lo: f64, mut hi: f64, flo: f64) -> Result<f64> {
        let lo_negative = flo < 0.0;
        let mut x = 0.5 * (lo + hi);
        for _ in 0..ROOT_ITERATION_CAP {
            let fx = self.eval_compensated(x);
            if fx == 0.0 {
                return Ok(x);
            }
            if (fx < 0.0) == lo_negative {
                lo = x;
            } else {
                hi = x;
            }
            if hi - lo <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
                return Ok(0.5 * (lo + hi));
            }
            let dfx = deriv.eval_compensated(x);
            let newton = x - fx / dfx;
            x = if dfx != 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if x == lo || x == hi {
                return Ok(x);
            }
        }
        Err(Error::NonConvergence(format!(
            "bracket [{lo}, {hi}] not resolved after {ROOT_ITERATION_CAP} iterations"
        )))
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `arccosh(y)` for `y >= 1`, written as `log1p((y − 1) + sqrt(y − 1)·sqrt(y + 1))`
/// so that it keeps full relative precision as `y → 1`.
pub fn arccosh(y: f64) -> f64 {
    if y > 1e150 {
        return LN_2 + y.ln();
    }
    let t = y - 1.0;
    (t + t.sqrt() * (y + 1.0).sqrt()).ln_1p()
}

fn check_chebyshev_args(m: f64, y: f64) -> Result<()> {
    if !(y >= 1.0) {
        return Err(domain(format!("Chebyshev argument must be >= 1, got {y}")));
    }
    if !(m >= 0.0) || !m.is_finite() {
        return Err(domain(format!(
            "Chebyshev order must be finite and >= 0, got {m}"
        )));
    }
    Ok(())
}

/// `T_m(y) = cosh(m · arccosh y)` for `y >= 1` and real `m >= 0`.
///
/// Overflows to `+∞` once `m · arccosh y` exceeds about 710; use
/// [`log_chebyshev_t`] there.
pub fn chebyshev_t(m: f64, y: f64) -> Result<f64> {
    check_chebyshev_args(m, y)?;
    Ok((m * arccosh(y)).cosh())
}

/// `log T_m(y)` without overflow.
pub fn log_chebyshev_t(m: f64, y: f64) -> Result<f64> {
    check_chebyshev_args(m, y)?;
    Ok(log_cosh(m * arccosh(y)))
}

/// `log cosh u` for `u >= 0`.
pub(crate) fn log_cosh(u: f64) -> f64 {
    if u < 20.0 {
        // cosh u − 1 = 2 sinh²(u/2) keeps relative accuracy for small u.
        let s = (0.5 * u).sinh();
        (2.0 * s * s).ln_1p()
    } else {
        u + (-2.0 * u).exp().ln_1p() - LN_2
    }
}
