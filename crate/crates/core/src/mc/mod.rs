//! Seeded Monte Carlo for the factorized laws and the cone exit time.
//!
//! Every random draw is a pure function of `(seed, index)`: sample `i` reads
//! from ChaCha8 stream `i` under a key derived from `seed`. Parallel work is
//! split into fixed-size chunks whose partial moments are merged in index
//! order, so results are bit-identical for any number of worker threads.

mod ks;
mod path;
mod sampler;

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::laplace::FactorizedLaw;

pub use ks::{ks_two_sample, KsResult};
pub use path::{
    simulate_exit_planar, simulate_exit_skew, simulate_exit_times, trace_exit_planar, ExitMethod,
    PathConfig, PlanarTrace,
};
pub use sampler::{sample_exit_m1, sample_exit_m2, sample_factorized};

/// Smallest sample count accepted by [`estimate_law_laplace`].
pub const MIN_LAW_SAMPLES: usize = 1_000;

/// Samples per parallel work unit. Fixed so that the reduction order never
/// depends on the thread count.
const CHUNK: usize = 4_096;

/// Independent random stream for draw `index` under `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n)`.
    pub stderr: f64,
    pub n: usize,
}

impl MCEstimate {
    /// `(mean − expected) / stderr`; zero when both the error and stderr vanish.
    pub fn z_score(&self, expected: f64) -> f64 {
        let diff = self.mean - expected;
        if diff == 0.0 {
            0.0
        } else if self.stderr == 0.0 {
            diff.signum() * f64::INFINITY
        } else {
            diff / self.stderr
        }
    }

    /// Whether `expected` lies within `k · stderr + allowance` of the mean.
    pub fn covers(&self, expected: f64, k: f64, allowance: f64) -> bool {
        (self.mean - expected).abs() <= k * self.stderr + allowance
    }
}

/// Streaming mean and sum of squared deviations (Welford), mergeable with
/// Chan's update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, v: f64) {
        self.n += 1;
        let delta = v - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (v - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.n as f64 * other.n as f64 / n as f64);
        self.n = n;
    }

    pub fn estimate(&self) -> MCEstimate {
        let stderr = if self.n > 1 {
            (self.m2.max(0.0) / (self.n - 1) as f64 / self.n as f64).sqrt()
        } else {
            0.0
        };
        MCEstimate {
            mean: self.mean,
            stderr,
            n: self.n,
        }
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::default();
        for v in iter {
            m.push(v);
        }
        m
    }
}

/// Mean of `f(stream_rng(seed, i))` over `i in 0..n`, computed in parallel
/// with a thread-count-independent reduction.
pub fn parallel_moments<F>(n: usize, seed: u64, f: F) -> Moments
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let base = ChaCha8Rng::seed_from_u64(seed);
    let chunks = n.div_ceil(CHUNK);
    let partials: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            (lo..hi)
                .map(|i| {
                    let mut rng = base.clone();
                    rng.set_stream(i as u64);
                    f(&mut rng)
                })
                .collect()
        })
        .collect();
    partials.iter().fold(Moments::default(), |mut acc, p| {
        acc.merge(p);
        acc
    })
}

/// Monte Carlo estimate of `E[exp(−x L)]` for `L ~ law` from `n` seeded draws.
pub fn estimate_law_laplace(
    law: &FactorizedLaw,
    x: f64,
    n: usize,
    seed: u64,
) -> Result<MCEstimate> {
    if !(x >= 0.0) {
        return Err(domain(format!("transform argument must be >= 0, got {x}")));
    }
    if n < MIN_LAW_SAMPLES {
        return Err(domain(format!(
            "at least {MIN_LAW_SAMPLES} samples required, got {n}"
        )));
    }
    Ok(parallel_moments(n, seed, |rng| (-x * sample_factorized(law, rng)).exp()).estimate())
}

/// `sqrt(2c² / (πT)) · exp(−x / (2T))`, whose mean over exit times `T` from the
/// cone of half-angle `c` is `φ̃_m(x)` with `m = π/(2c)`.
pub fn gauss_laplace_functional(t: f64, c: f64, x: f64) -> f64 {
    (2.0 * c * c / (PI * t)).sqrt() * (-x / (2.0 * t)).exp()
}

/// Estimate of the Gauss-Laplace functional over exit-time samples.
pub fn estimate_gauss_laplace(samples: &[f64], c: f64, x: f64) -> Result<MCEstimate> {
    if samples.is_empty() {
        return Err(domain("no exit-time samples"));
    }
    if let Some(bad) = samples.iter().find(|&&t| !(t > 0.0 && t.is_finite())) {
        return Err(domain(format!(
            "exit times must be positive and finite, got {bad}"
        )));
    }
    if !(c > 0.0) || !(x >= 0.0) {
        return Err(domain(format!(
            "need c > 0 and x >= 0, got c = {c}, x = {x}"
        )));
    }
    Ok(samples
        .iter()
        .map(|&t| gauss_laplace_functional(t, c, x))
        .collect::<Moments>()
        .estimate())
}

/// `n` i.i.d. draws of `sampler`, draw `i` taken from `stream_rng(seed, i)`.
pub fn draw_samples<F>(n: usize, seed: u64, sampler: F) -> Vec<f64>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let base = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = base.clone();
            rng.set_stream(i as u64);
            sampler(&mut rng)
        })
        .collect()
}
