//! Adaptive Gauss-Kronrod quadrature and the arcsine Laplace transform.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_2_PI, FRAC_PI_2};

use crate::error::{domain, Error, Result};

/// Default absolute tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Subinterval budget before giving up.
const MAX_INTERVALS: usize = 4000;

/// Largest truncation point tried by [`integrate_semi_infinite`].
const MAX_CUTOFF: f64 = 1.152_921_504_606_847e18; // 2^60

// 15-point Kronrod nodes on [0, 1] (symmetric); odd indices are the 7-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 15-point Kronrod rule with the QUADPACK error heuristic.
fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    if !resk.is_finite() {
        return Err(domain(format!("integrand is not finite on [{a}, {b}]")));
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Segment { a, b, value, error })
}

/// Globally adaptive quadrature over the pieces `points[0] < points[1] < ...`.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    tol: f64,
) -> Result<QuadratureResult> {
    if !(tol > 0.0) {
        return Err(domain(format!(
            "quadrature tolerance must be positive, got {tol}"
        )));
    }
    if points.len() < 2 || points.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(domain("integration limits must be strictly increasing"));
    }
    // Refining below this width signals a non-integrable or singular integrand.
    let min_width = 1e-13 * (points[points.len() - 1] - points[0]);
    let mut heap = BinaryHeap::with_capacity(MAX_INTERVALS);
    let mut evaluations = 0;
    for w in points.windows(2) {
        heap.push(kronrod15(&f, w[0], w[1])?);
        evaluations += 15;
    }
    loop {
        let total_error: f64 = heap.iter().map(|s| s.error).sum();
        if total_error <= tol {
            break;
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::ToleranceNotReached {
                tol,
                estimate: total_error,
                evaluations,
            });
        }
        let worst = heap.pop().expect("at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) || worst.b - worst.a < min_width {
            return Err(Error::ToleranceNotReached {
                tol,
                estimate: total_error,
                evaluations,
            });
        }
        heap.push(kronrod15(&f, worst.a, mid)?);
        heap.push(kronrod15(&f, mid, worst.b)?);
        evaluations += 30;
    }
    let mut segments = heap.into_vec();
    segments.sort_by(|l, r| l.a.total_cmp(&r.a));
    Ok(QuadratureResult {
        value: segments.iter().map(|s| s.value).sum(),
        error_estimate: segments.iter().map(|s| s.error).sum(),
        evaluations,
    })
}

/// `∫_a^b f` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
    integrate_with_breaks(f, &[a, b], tol)
}

/// `∫_0^∞ f` for integrands with eventually monotone decay.
///
/// The range is truncated at the first `Z` in `1, 2, 4, ...` with
/// `|f(Z)| · Z < tol / 10`, then integrated over the dyadic pieces
/// `[0, 1], [1, 2], ..., [Z/2, Z]`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, tol: f64) -> Result<QuadratureResult> {
    if !(tol > 0.0) {
        return Err(domain(format!(
            "quadrature tolerance must be positive, got {tol}"
        )));
    }
    let threshold = tol / 10.0;
    let mut points = vec![0.0, 1.0];
    let mut cutoff = 1.0;
    while !((f(cutoff) * cutoff).abs() < threshold) {
        cutoff *= 2.0;
        if cutoff > MAX_CUTOFF {
            return Err(Error::NonDecayingIntegrand { cutoff, threshold });
        }
        points.push(cutoff);
    }
    let mut res = integrate_with_breaks(f, &points, 0.9 * tol)?;
    res.evaluations += points.len() - 1;
    Ok(res)
}

/// `E[exp(−z G)]` for `G` arcsine-distributed on `[0, 1]`:
///
/// ```text
/// (1/π) ∫_0^1 e^{−hz} dh / sqrt(h(1−h)) = (2/π) ∫_0^{π/2} exp(−z sin² v) dv.
/// ```
///
/// The right-hand form has a smooth integrand. For large `z` its mass sits in
/// `v ≲ 1/sqrt(z)`, so the range is split there.
pub fn arcsine_laplace(z: f64, tol: f64) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(domain(format!(
            "arcsine Laplace argument must be >= 0, got {z}"
        )));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let integrand = |v: f64| {
        let s = v.sin();
        (-z * s * s).exp()
    };
    // Beyond `edge`, z sin²v >= 400/π² and the integrand is below 3e-18.
    let edge = 10.0 / z.sqrt();
    let points: Vec<f64> = if edge < FRAC_PI_2 {
        vec![0.0, 0.25 * edge, edge, FRAC_PI_2]
    } else {
        vec![0.0, FRAC_PI_2]
    };
    let res = integrate_with_breaks(integrand, &points, tol / FRAC_2_PI)?;
    Ok(FRAC_2_PI * res.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{LN_2, PI};

    /// e^{−z/2} I_0(z/2) by its power series; independent of the v-form.
    fn arcsine_laplace_series(z: f64) -> f64 {
        let q = z * z / 16.0;
        let (mut term, mut sum) = (1.0, 1.0);
        for k in 1..400 {
            term *= q / (k as f64 * k as f64);
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
        (-0.5 * z).exp() * sum
    }

    /// The Riemann sum (1/n) Σ exp(−z sin²(π(2k−1)/(2(2n+1)))).
    fn riemann(z: f64, n: usize) -> f64 {
        let m = (2 * n + 1) as f64;
        (1..=n)
            .map(|k| {
                let s = (PI * (2 * k - 1) as f64 / (2.0 * m)).sin();
                (-z * s * s).exp()
            })
            .sum::<f64>()
            / n as f64
    }

    #[test]
    fn constant_integrands() {
        let r = integrate(|_| 1.0, 0.0, 1.0, 1e-12).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-15);
        assert!(r.evaluations > 0);
        assert!(r.error_estimate <= 1e-12);
        let r = integrate(
            |v: f64| (-0.0 * v.sin().powi(2)).exp(),
            0.0,
            FRAC_PI_2,
            1e-12,
        )
        .unwrap();
        assert_abs_diff_eq!(r.value, FRAC_PI_2, epsilon = 1e-14);
    }

    #[test]
    fn gaussian_moment_on_finite_range() {
        // ∫_0^∞ y e^{−(x+1)y²/2} dy = 1/(1+x); the tail past 20 is below 1e−80.
        for x in [0.0, 1.0, 4.0, 9.0] {
            let r = integrate(
                |y: f64| y * (-(x + 1.0) * y * y / 2.0).exp(),
                0.0,
                20.0,
                1e-10,
            )
            .unwrap();
            assert_abs_diff_eq!(r.value, 1.0 / (1.0 + x), epsilon = 1e-9);
        }
    }

    #[test]
    fn semi_infinite_examples() {
        let r = integrate_semi_infinite(|z: f64| (-z).exp(), 1e-10).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-10);
        let frullani = |z: f64| {
            if z == 0.0 {
                1.0
            } else {
                -(-z).exp_m1() / z * (-z).exp()
            }
        };
        let r = integrate_semi_infinite(frullani, 1e-10).unwrap();
        assert_abs_diff_eq!(r.value, LN_2, epsilon = 1e-10);
        let r = integrate_semi_infinite(|z: f64| z * (-z * z / 2.0).exp(), 1e-10).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn frullani_matches_trapezoid_oracle() {
        // Richardson-extrapolated trapezoid on [0, 60] for the same integrand.
        let f = |z: f64| {
            if z == 0.0 {
                1.0
            } else {
                -(-z).exp_m1() / z * (-z).exp()
            }
        };
        let trap = |n: usize| {
            let h = 60.0 / n as f64;
            (0..=n)
                .map(|i| {
                    let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                    w * f(i as f64 * h)
                })
                .sum::<f64>()
                * h
        };
        let oracle = (4.0 * trap(400_000) - trap(200_000)) / 3.0;
        let r = integrate_semi_infinite(f, 1e-10).unwrap();
        assert_abs_diff_eq!(r.value, oracle, epsilon = 1e-10);
    }

    #[test]
    fn non_decaying_and_bad_input_errors() {
        assert!(matches!(
            integrate_semi_infinite(|_| 1.0, 1e-8),
            Err(Error::NonDecayingIntegrand { .. })
        ));
        assert!(integrate(|x| x, 1.0, 0.0, 1e-8).is_err());
        assert!(integrate(|x| x, 0.0, 1.0, 0.0).is_err());
        assert!(integrate(|_| f64::NAN, 0.0, 1.0, 1e-8).is_err());
    }

    #[test]
    fn singular_integrand_reports_tolerance_not_reached() {
        let r = integrate(|x: f64| x.recip(), 0.0, 1.0, 1e-8);
        assert!(matches!(r, Err(Error::ToleranceNotReached { .. })), "{r:?}");
    }

    #[test]
    fn arcsine_laplace_examples() {
        assert_eq!(arcsine_laplace(0.0, DEFAULT_TOL).unwrap(), 1.0);
        assert!(arcsine_laplace(-1.0, DEFAULT_TOL).is_err());
        // Frozen from the singular h-form integrated independently to 1e−14.
        assert_abs_diff_eq!(
            arcsine_laplace(2.0, DEFAULT_TOL).unwrap(),
            0.465_759_607_593_640_4,
            epsilon = 1e-10
        );
        let mut prev = 1.0;
        for z in [0.5, 1.0, 4.0, 16.0, 100.0, 1e4, 1e8, 1e16] {
            let v = arcsine_laplace(z, DEFAULT_TOL).unwrap();
            assert!(v < prev && v > 0.0);
            assert!(v >= (-z).exp());
            prev = v;
        }
    }

    #[test]
    fn arcsine_laplace_matches_bessel_series() {
        for z in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 80.0] {
            assert_abs_diff_eq!(
                arcsine_laplace(z, 1e-12).unwrap(),
                arcsine_laplace_series(z),
                epsilon = 1e-11
            );
        }
    }

    #[test]
    fn arcsine_laplace_large_z_tracks_leading_asymptotic() {
        // e^{−t} I_0(t) ~ (2πt)^{−1/2} (1 + 1/(8t)) with t = z/2.
        for z in [1e4, 1e8, 1e12, 1e18] {
            let t = z / 2.0;
            let asym = (2.0 * PI * t).sqrt().recip() * (1.0 + 1.0 / (8.0 * t));
            let v = arcsine_laplace(z, 1e-14).unwrap();
            assert!(
                (v - asym).abs() <= 1e-6 * asym + 1e-14,
                "z={z}: {v} vs {asym}"
            );
        }
    }

    #[test]
    fn arcsine_laplace_is_completely_monotone_on_grid() {
        let h = 1e-3;
        for z in [0.0f64, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
            let f = |t: f64| arcsine_laplace(t, 1e-13).unwrap();
            let (f0, f1, f2) = (f(z), f(z + h), f(z + 2.0 * h));
            assert!(f1 - f0 <= 0.0, "first difference at z={z}");
            assert!(f2 - 2.0 * f1 + f0 >= 0.0, "second difference at z={z}");
        }
    }

    #[test]
    fn riemann_sum_converges_to_arcsine_laplace() {
        for z in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
            let q = arcsine_laplace(z, DEFAULT_TOL).unwrap();
            assert!((riemann(z, 10_000) - q).abs() <= 1e-4, "z={z}");
        }
    }

    #[test]
    fn kronrod_is_exact_for_low_degree_polynomials() {
        let r = integrate(|x: f64| x.powi(20) - 3.0 * x.powi(7), -1.0, 2.0, 1e-6).unwrap();
        let exact = (2f64.powi(21) + 1.0) / 21.0 - 3.0 * (2f64.powi(8) - 1.0) / 8.0;
        assert_abs_diff_eq!(r.value, exact, epsilon = 1e-9 * exact.abs());
    }
}
