//! Interval estimates and hypothesis tests for the Monte Carlo reports.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::special::normal_quantile;
use crate::sum::CompensatedSum;

/// Two-sided normal critical value for the given confidence level.
pub fn critical_value(confidence: f64) -> f64 {
    normal_quantile(0.5 + confidence / 2.0)
}

/// Wilson score interval for `hits` successes out of `n` at critical value `z`.
pub fn wilson_interval(hits: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let phat = hits as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (phat + z2 / (2.0 * nf)) / denom;
    let half = z * (phat * (1.0 - phat) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Running mean and second moment with compensated sums; mergeable.
#[derive(Debug, Clone, Default)]
pub struct MeanAccumulator {
    n: u64,
    sum: CompensatedSum<f64>,
    sum_sq: CompensatedSum<f64>,
    nonzero: u64,
}

impl MeanAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        self.n += 1;
        self.sum.add(x);
        self.sum_sq.add(x * x);
        if x != 0.0 {
            self.nonzero += 1;
        }
    }

    pub fn merge(&mut self, other: &Self) {
        self.n += other.n;
        self.sum.merge(&other.sum);
        self.sum_sq.merge(&other.sum_sq);
        self.nonzero += other.nonzero;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    /// Number of nonzero observations.
    pub fn nonzero(&self) -> u64 {
        self.nonzero
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            f64::NAN
        } else {
            self.sum.value() / self.n as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            return f64::NAN;
        }
        let n = self.n as f64;
        let mean = self.mean();
        let var = (self.sum_sq.value() / n - mean * mean).max(0.0);
        (var / n).sqrt()
    }
}

/// Kolmogorov's limiting survival function Q(λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsOutcome {
    pub statistic: f64,
    pub p_value: f64,
    pub level: f64,
    pub reject: bool,
    pub n1: usize,
    pub n2: usize,
}

/// Two-sample Kolmogorov–Smirnov test with the asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64], level: f64) -> Result<KsOutcome> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty);
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(domain("sample", f64::NAN, "samples must not contain NaN"));
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n1, n2) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n1 && j < n2 {
        let v = x[i].min(y[j]);
        while i < n1 && x[i] <= v {
            i += 1;
        }
        while j < n2 && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n1 as f64 - j as f64 / n2 as f64).abs());
    }
    let ne = (n1 as f64 * n2 as f64) / (n1 + n2) as f64;
    let sqrt_ne = ne.sqrt();
    let p_value = kolmogorov_q((sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d);
    Ok(KsOutcome {
        statistic: d,
        p_value,
        level,
        reject: p_value < level,
        n1,
        n2,
    })
}

/// Hill estimate of a power-law tail index from the top order statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    /// Number of upper order statistics used.
    pub k: usize,
    pub sample_size: usize,
    pub estimate: f64,
    /// Normal-approximation interval estimate·(1 ± z/√k).
    pub interval: (f64, f64),
}

/// Minimum number of order statistics accepted by [`hill_estimate`].
pub const HILL_MIN_K: usize = 20;

/// k / Σ_{i≤k} ln(X_(i)/X_(k+1)) with X_(1) ≥ X_(2) ≥ … the sorted sample.
pub fn hill_estimate(samples: &[f64], k: usize, z: f64) -> Result<TailEstimate> {
    if k < HILL_MIN_K {
        return Err(domain("k", k as f64, "needs at least 20 order statistics"));
    }
    if k >= samples.len() {
        return Err(domain("k", k as f64, "k must be smaller than the sample size"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let threshold = sorted[k];
    if !(threshold > 0.0) {
        return Err(domain("threshold", threshold, "top k+1 order statistics must be positive"));
    }
    let ln_t = threshold.ln();
    let sum: f64 = sorted[..k].iter().map(|x| x.ln() - ln_t).collect::<CompensatedSum<f64>>().value();
    let estimate = k as f64 / sum;
    let half = z / (k as f64).sqrt();
    Ok(TailEstimate {
        k,
        sample_size: samples.len(),
        estimate,
        interval: (estimate * (1.0 - half), estimate * (1.0 + half)),
    })
}
