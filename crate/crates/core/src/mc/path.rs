use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};

/// Default simulated clock horizon: `max_steps = ceil(DEFAULT_HORIZON / step)`.
pub const DEFAULT_HORIZON: f64 = 1.0e4;

/// Default radius below which the planar simulator takes quarter steps.
pub const DEFAULT_MIN_RADIUS: f64 = 1.0e-2;

/// Radius at which the planar simulator gives up; below this `step · |Z|²`
/// loses all precision.
pub const ORIGIN_FLOOR: f64 = 1.0e-100;

/// Discretization parameters for the exit-time simulators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathConfig {
    /// Cone half-angle in radians, `0 < c ≤ π`.
    pub c: f64,
    /// Euler step `h` of the Brownian clock.
    pub step: f64,
    /// Step cap per path.
    pub max_steps: u64,
    /// Planar simulator only: radius below which steps are refined by 4.
    pub min_radius: f64,
}

impl PathConfig {
    /// Config with the default step cap and refinement radius.
    pub fn new(c: f64, step: f64) -> Result<Self> {
        let max_steps = if step > 0.0 {
            (DEFAULT_HORIZON / step).ceil().min(u64::MAX as f64) as u64
        } else {
            0
        };
        let cfg = PathConfig {
            c,
            step,
            max_steps,
            min_radius: DEFAULT_MIN_RADIUS,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_max_steps(self, max_steps: u64) -> Result<Self> {
        let cfg = PathConfig { max_steps, ..self };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_min_radius(self, min_radius: f64) -> Result<Self> {
        let cfg = PathConfig { min_radius, ..self };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c <= PI) {
            return Err(domain(format!(
                "cone half-angle must be in (0, π], got {}",
                self.c
            )));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(domain(format!(
                "step must be positive and finite, got {}",
                self.step
            )));
        }
        if self.max_steps == 0 {
            return Err(domain("max_steps must be positive"));
        }
        if !(self.min_radius > 0.0 && self.min_radius.is_finite()) {
            return Err(domain(format!(
                "min_radius must be positive and finite, got {}",
                self.min_radius
            )));
        }
        Ok(())
    }
}

/// Fraction of the step `a → b` at which the walk first reaches `±c`.
fn crossing_fraction(a: f64, b: f64, c: f64) -> f64 {
    let level = if b >= c { c } else { -c };
    ((level - a) / (b - a)).clamp(0.0, 1.0)
}

/// Exit time via the skew product: `∫₀^τ exp(2β_s) ds`, where `τ` is the first
/// time `|γ|` reaches `c` and `β`, `γ` are independent Brownian motions.
///
/// `β`, `γ` move by `N(0, h)` steps; the integral uses trapezoidal weights and
/// the last step is cut at the linearly interpolated crossing of `γ`.
pub fn simulate_exit_skew<R: Rng + ?Sized>(cfg: &PathConfig, rng: &mut R) -> Result<f64> {
    cfg.validate()?;
    let h = cfg.step;
    let sd = h.sqrt();
    let mut beta = 0.0f64;
    let mut gamma = 0.0f64;
    let mut e = 1.0f64;
    let mut area = 0.0f64;
    for _ in 0..cfg.max_steps {
        let db: f64 = rng.sample(StandardNormal);
        let dg: f64 = rng.sample(StandardNormal);
        let beta_next = sd.mul_add(db, beta);
        let gamma_next = sd.mul_add(dg, gamma);
        if gamma_next.abs() >= cfg.c {
            let f = crossing_fraction(gamma, gamma_next, cfg.c);
            let e_cross = (2.0 * (beta + f * (beta_next - beta))).exp();
            return Ok(area + 0.5 * f * h * (e + e_cross));
        }
        let e_next = (2.0 * beta_next).exp();
        area += 0.5 * h * (e + e_next);
        beta = beta_next;
        gamma = gamma_next;
        e = e_next;
    }
    Err(Error::MaxStepsExceeded {
        max_steps: cfg.max_steps,
    })
}

/// Summary of one planar path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarTrace {
    /// Elapsed time at exit.
    pub time: f64,
    pub steps: u64,
    /// Largest single-step change of the winding angle.
    pub max_abs_dtheta: f64,
}

/// Direct simulation of planar Brownian motion from `(1, 0)`, tracking the
/// continuous winding angle until `|θ| ≥ c`.
///
/// The time step is `h · |Z|²`, divided by a further 4 when
/// `|Z| < cfg.min_radius`, so every step moves the angle by `O(sqrt(h))`
/// radians.
pub fn trace_exit_planar<R: Rng + ?Sized>(cfg: &PathConfig, rng: &mut R) -> Result<PlanarTrace> {
    cfg.validate()?;
    let (mut x, mut y) = (1.0f64, 0.0f64);
    let mut theta = 0.0f64;
    let mut t = 0.0f64;
    let mut max_dtheta = 0.0f64;
    for k in 0..cfg.max_steps {
        let r2 = x.mul_add(x, y * y);
        let mut dt = cfg.step * r2;
        if r2 < cfg.min_radius * cfg.min_radius {
            dt *= 0.25;
        }
        let sd = dt.sqrt();
        let nx: f64 = rng.sample(StandardNormal);
        let ny: f64 = rng.sample(StandardNormal);
        let x_next = sd.mul_add(nx, x);
        let y_next = sd.mul_add(ny, y);
        let r_next = x_next.hypot(y_next);
        if r_next < ORIGIN_FLOOR {
            return Err(Error::OriginTooClose { radius: r_next });
        }
        let cross = x.mul_add(y_next, -(y * x_next));
        let dot = x.mul_add(x_next, y * y_next);
        let dtheta = cross.atan2(dot);
        max_dtheta = max_dtheta.max(dtheta.abs());
        let theta_next = theta + dtheta;
        if theta_next.abs() >= cfg.c {
            let f = crossing_fraction(theta, theta_next, cfg.c);
            return Ok(PlanarTrace {
                time: f.mul_add(dt, t),
                steps: k + 1,
                max_abs_dtheta: max_dtheta,
            });
        }
        t += dt;
        theta = theta_next;
        x = x_next;
        y = y_next;
    }
    Err(Error::MaxStepsExceeded {
        max_steps: cfg.max_steps,
    })
}

/// Exit time of the direct planar simulation; see [`trace_exit_planar`].
pub fn simulate_exit_planar<R: Rng + ?Sized>(cfg: &PathConfig, rng: &mut R) -> Result<f64> {
    trace_exit_planar(cfg, rng).map(|tr| tr.time)
}

/// Which simulator produces exit times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExitMethod {
    Skew,
    Planar,
}

impl ExitMethod {
    pub fn name(self) -> &'static str {
        match self {
            ExitMethod::Skew => "skew",
            ExitMethod::Planar => "planar",
        }
    }

    pub fn simulate<R: Rng + ?Sized>(self, cfg: &PathConfig, rng: &mut R) -> Result<f64> {
        match self {
            ExitMethod::Skew => simulate_exit_skew(cfg, rng),
            ExitMethod::Planar => simulate_exit_planar(cfg, rng),
        }
    }
}

/// `n` simulated exit times, path `i` driven by stream `i` under `seed`.
///
/// On failure the error of the lowest failing path index is returned.
pub fn simulate_exit_times(
    cfg: &PathConfig,
    method: ExitMethod,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let base = ChaCha8Rng::seed_from_u64(seed);
    let results: Vec<Result<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = base.clone();
            rng.set_stream(i as u64);
            method.simulate(cfg, &mut rng)
        })
        .collect();
    results.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::stream_rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn config_validation() {
        assert!(PathConfig::new(0.0, 1e-3).is_err());
        assert!(PathConfig::new(4.0, 1e-3).is_err());
        assert!(PathConfig::new(PI, 1e-3).is_ok());
        assert!(PathConfig::new(1.0, 0.0).is_err());
        assert!(PathConfig::new(1.0, f64::NAN).is_err());
        let cfg = PathConfig::new(1.0, 1e-4).unwrap();
        assert_eq!(cfg.max_steps, 100_000_000);
        assert!(cfg.with_max_steps(0).is_err());
        assert!(cfg.with_min_radius(-1.0).is_err());
    }

    #[test]
    fn crossing_fraction_is_linear() {
        assert_eq!(crossing_fraction(0.5, 1.5, 1.0), 0.5);
        assert_eq!(crossing_fraction(-0.5, -1.5, 1.0), 0.5);
        assert_eq!(crossing_fraction(0.0, 4.0, 1.0), 0.25);
    }

    #[test]
    fn step_cap_is_reported() {
        let cfg = PathConfig::new(FRAC_PI_2, 1e-6)
            .unwrap()
            .with_max_steps(10)
            .unwrap();
        let mut rng = stream_rng(1, 0);
        assert_eq!(
            simulate_exit_skew(&cfg, &mut rng),
            Err(Error::MaxStepsExceeded { max_steps: 10 })
        );
        assert_eq!(
            simulate_exit_planar(&cfg, &mut rng),
            Err(Error::MaxStepsExceeded { max_steps: 10 })
        );
        let err = simulate_exit_times(&cfg, ExitMethod::Skew, 8, 1).unwrap_err();
        assert_eq!(err, Error::MaxStepsExceeded { max_steps: 10 });
    }

    #[test]
    fn samples_are_positive_and_finite() {
        let cfg = PathConfig::new(FRAC_PI_4, 1e-3).unwrap();
        for method in [ExitMethod::Skew, ExitMethod::Planar] {
            let t = simulate_exit_times(&cfg, method, 2_000, 3).unwrap();
            assert!(t.iter().all(|&v| v > 0.0 && v.is_finite()), "{method:?}");
        }
    }

    #[test]
    fn planar_winding_is_continuous() {
        let cfg = PathConfig::new(FRAC_PI_2, 1e-3).unwrap();
        for i in 0..500 {
            let tr = trace_exit_planar(&cfg, &mut stream_rng(9, i)).unwrap();
            assert!(tr.max_abs_dtheta < FRAC_PI_2, "path {i}: {tr:?}");
            assert!(tr.time > 0.0 && tr.steps > 0);
        }
    }

    #[test]
    fn simulation_is_reproducible_across_pools() {
        let cfg = PathConfig::new(FRAC_PI_4, 1e-3).unwrap();
        let a = simulate_exit_times(&cfg, ExitMethod::Planar, 300, 17).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| simulate_exit_times(&cfg, ExitMethod::Planar, 300, 17).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn method_names() {
        assert_eq!(ExitMethod::Skew.name(), "skew");
        assert_eq!(ExitMethod::Planar.name(), "planar");
    }
}
