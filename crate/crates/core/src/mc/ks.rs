use crate::error::{domain, Result};

/// Two-sample Kolmogorov-Smirnov comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    /// `sup |F_a − F_b|` over the pooled sample.
    pub statistic: f64,
    /// Asymptotic critical value at the requested level.
    pub critical_value: f64,
    /// Asymptotic p-value of the statistic.
    pub p_value: f64,
}

impl KsResult {
    pub fn rejects(&self) -> bool {
        self.statistic > self.critical_value
    }
}

/// Kolmogorov survival function `Q(λ) = 2 Σ (−1)^{k−1} exp(−2k²λ²)`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-17 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample KS statistic of `a` against `b` with the asymptotic critical
/// value `sqrt(−ln(α/2) / 2) · sqrt((n + m) / (n m))` at level `alpha`.
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(domain("KS test needs two non-empty samples"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(format!("level must be in (0, 1), got {alpha}")));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(domain("KS test samples contain NaN"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < n && j < m {
        let v = a[i].min(b[j]);
        while i < n && a[i] <= v {
            i += 1;
        }
        while j < m && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n as f64 * m as f64) / (n + m) as f64;
    let critical_value = (-(alpha / 2.0).ln() / 2.0).sqrt() / ne.sqrt();
    let root = ne.sqrt();
    let p_value = kolmogorov_q((root + 0.12 + 0.11 / root) * d);
    Ok(KsResult {
        statistic: d,
        critical_value,
        p_value,
    })
}
