use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::laplace::FactorizedLaw;

/// One draw of `[N²/2] + Σ c_k · E_k`.
pub fn sample_factorized<R: Rng + ?Sized>(law: &FactorizedLaw, rng: &mut R) -> f64 {
    let mut s = 0.0;
    if law.has_half_gaussian() {
        let n: f64 = rng.sample(StandardNormal);
        s = 0.5 * n * n;
    }
    for &c in law.exp_scales() {
        let e: f64 = rng.sample(Exp1);
        s = c.mul_add(e, s);
    }
    s
}

fn nonzero_square<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let n: f64 = rng.sample(StandardNormal);
        if n != 0.0 {
            return n * n;
        }
    }
}

/// Exit time from the half-plane (`c = π/2`), distributed as `1 / N²`.
pub fn sample_exit_m1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    nonzero_square(rng).recip()
}

/// Exit time from the quarter-plane (`c = π/4`), distributed as
/// `1 / (2 · max(N², Ñ²))`.
pub fn sample_exit_m2<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let a = nonzero_square(rng);
    let b = nonzero_square(rng);
    0.5 / a.max(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laplace::{factorize, LawVariant};
    use crate::mc::{draw_samples, Moments};

    fn mean_of<F: Fn(&mut rand_chacha::ChaCha8Rng) -> f64 + Sync>(seed: u64, f: F) -> (f64, f64) {
        let e = draw_samples(1_000_000, seed, f)
            .into_iter()
            .collect::<Moments>()
            .estimate();
        (e.mean, e.stderr)
    }

    #[test]
    fn factorized_means() {
        for (m, variant, want, seed) in [
            (1, LawVariant::K, 0.5, 1),
            (2, LawVariant::K, 2.0, 2),
            (1, LawVariant::KTilde, 1.0, 3),
        ] {
            let law = factorize(m, variant).unwrap();
            assert!((law.mean() - want).abs() < 1e-14);
            let (mean, se) = mean_of(seed, |rng| sample_factorized(&law, rng));
            assert!(
                (mean - want).abs() <= 3.0 * se,
                "m={m} {variant:?}: {mean} ± {se}"
            );
        }
    }

    #[test]
    fn exit_m1_median() {
        let mut t = draw_samples(1_000_000, 4, sample_exit_m1);
        assert!(t.iter().all(|&v| v > 0.0 && v.is_finite()));
        // Oracle: 1 / empirical median of squared normals from an independent stream.
        let mut sq = draw_samples(1_000_000, 40, |rng| {
            let n: f64 = rng.sample(StandardNormal);
            n * n
        });
        let mid = t.len() / 2;
        let med_t = *t.select_nth_unstable_by(mid, f64::total_cmp).1;
        let med_sq = *sq.select_nth_unstable_by(mid, f64::total_cmp).1;
        assert!(
            (med_t - 1.0 / med_sq).abs() < 0.02,
            "{med_t} vs {}",
            1.0 / med_sq
        );
        assert!((med_t - 2.198).abs() < 0.02, "{med_t}");
    }

    #[test]
    fn exit_m2_dominated_by_m1() {
        // Coupled draws: the first normal of the m = 2 sampler is the m = 1 normal.
        let pairs = draw_samples(100_000, 5, |rng| {
            let mut a = rng.clone();
            let t1 = sample_exit_m1(&mut a);
            let t2 = sample_exit_m2(rng);
            assert!(t2 > 0.0);
            assert!(t2 <= 0.5 * t1);
            t2
        });
        assert_eq!(pairs.len(), 100_000);

        let t1 = draw_samples(100_000, 6, sample_exit_m1);
        let t2 = draw_samples(100_000, 7, sample_exit_m2);
        let cdf = |s: &[f64], q: f64| s.iter().filter(|&&v| v <= q).count() as f64 / s.len() as f64;
        for q in [0.05, 0.1, 0.3, 1.0, 3.0, 10.0] {
            assert!(cdf(&t2, q) >= cdf(&t1, q), "q={q}");
        }
    }
}
