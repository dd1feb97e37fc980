//! Pathwise inequality suites and distributional tests.

use serde::{Deserialize, Serialize};

use super::MCConfig;
use crate::error::{domain, Error, Result};
use crate::parallel::{map_chunks, map_replicates};
use crate::path::{fill_grid, simulate_jumps, simulate_subordinated, sp_from_jumps, step_path_from_jumps};
use crate::rng::{RngStream, StreamDomain};
use crate::stable::{sample_one_sided, sp_law, StableLaw};
use crate::stats::{ks_two_sample, KsOutcome};
use crate::variation::{
    holder_on_times, jump_p_sum, lemma1_check, lemma2_check, block_pvars, pvar_bruteforce, pvar_dp, pvar_value,
};

/// Relative tolerance separating a strict gap from rounding.
pub const STRICT_GAP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpSuiteReport {
    pub trials: usize,
    pub comparisons: usize,
    pub mismatches: usize,
    pub max_relative_difference: f64,
}

/// Exponents used by the oracle comparison.
pub const DP_SUITE_EXPONENTS: [f64; 5] = [1.0, 1.5, 2.0, 3.0, 5.0];

/// Compares the dynamic program with exhaustive search on random sequences of
/// length 1 to 12 (random walks, i.i.d. values, and coarse values with ties).
pub fn dp_oracle_suite(trials: usize, seed: u64, tolerance: f64) -> Result<DpSuiteReport> {
    let mut comparisons = 0;
    let mut mismatches = 0;
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let mut rng = RngStream::replicate(seed, StreamDomain::Auxiliary, t as u64);
        let len = 1 + (rng.uniform() * 12.0) as usize;
        let mut acc = 0.0;
        let values: Vec<f64> = (0..len)
            .map(|_| match t % 3 {
                0 => {
                    acc += rng.normal();
                    acc
                }
                1 => rng.normal(),
                _ => (rng.uniform() * 4.0).floor(),
            })
            .collect();
        for p in DP_SUITE_EXPONENTS {
            let dp = pvar_dp(&values, p)?.value;
            let bf = pvar_bruteforce(&values, p)?.value;
            let rel = if bf == 0.0 { dp.abs() } else { ((dp - bf) / bf).abs() };
            worst = worst.max(rel);
            comparisons += 1;
            if rel > tolerance {
                mismatches += 1;
            }
        }
    }
    Ok(DpSuiteReport {
        trials,
        comparisons,
        mismatches,
        max_relative_difference: worst,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaSuiteConfig {
    pub n_paths: usize,
    pub grid_n: usize,
    pub master_seed: u64,
    pub alphas: Vec<f64>,
    pub exponents: Vec<f64>,
    pub blocks: Vec<usize>,
    pub threads: usize,
}

impl Default for LemmaSuiteConfig {
    fn default() -> Self {
        Self {
            n_paths: 10_000,
            grid_n: 512,
            master_seed: 0,
            alphas: vec![0.8, 1.0, 1.5, 2.0],
            exponents: vec![1.5, 2.0, 3.0],
            blocks: vec![2, 4, 8],
            threads: 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LemmaSuiteReport {
    pub stable_paths: usize,
    pub premise_paths: usize,
    pub block_checks: usize,
    pub block_violations: usize,
    /// Lemma-2 checks on stable paths, where the premise almost never holds.
    pub vanishing_checks: usize,
    pub vanishing_premise_true: usize,
    pub vanishing_violations: usize,
    /// Lemma-2 checks on synthetic paths built to satisfy the premise.
    pub premise_checks: usize,
    pub premise_true: usize,
    pub premise_violations: usize,
    /// Largest lhs/rhs over the block inequality.
    pub max_block_ratio: f64,
    /// Largest lhs/rhs over premise-satisfying paths.
    pub max_premise_ratio: f64,
}

impl LemmaSuiteReport {
    fn merge(&mut self, o: &Self) {
        self.stable_paths += o.stable_paths;
        self.premise_paths += o.premise_paths;
        self.block_checks += o.block_checks;
        self.block_violations += o.block_violations;
        self.vanishing_checks += o.vanishing_checks;
        self.vanishing_premise_true += o.vanishing_premise_true;
        self.vanishing_violations += o.vanishing_violations;
        self.premise_checks += o.premise_checks;
        self.premise_true += o.premise_true;
        self.premise_violations += o.premise_violations;
        self.max_block_ratio = self.max_block_ratio.max(o.max_block_ratio);
        self.max_premise_ratio = self.max_premise_ratio.max(o.max_premise_ratio);
    }

    pub fn violations(&self) -> usize {
        self.block_violations + self.vanishing_violations + self.premise_violations
    }
}

/// Path that returns to zero at every block boundary: a random walk inside
/// each block with its end pinned by a linear correction.
fn pinned_blocks(rng: &mut RngStream, grid_n: usize, n_blocks: usize) -> Vec<f64> {
    let width = grid_n / n_blocks;
    let mut out = Vec::with_capacity(grid_n + 1);
    out.push(0.0);
    for _ in 0..n_blocks {
        let mut walk = vec![0.0; width + 1];
        for k in 1..=width {
            walk[k] = walk[k - 1] + rng.normal();
        }
        let end = walk[width];
        for (k, w) in walk.iter().enumerate().skip(1) {
            out.push(if k == width { 0.0 } else { w - end * k as f64 / width as f64 });
        }
    }
    out
}

/// Runs both block inequalities on stable grid paths and on premise paths.
pub fn lemma_suite(cfg: &LemmaSuiteConfig) -> Result<LemmaSuiteReport> {
    if cfg.alphas.is_empty() || cfg.exponents.is_empty() || cfg.blocks.is_empty() {
        return Err(Error::Config("lemma suite needs alphas, exponents and block counts".into()));
    }
    if let Some(b) = cfg.blocks.iter().find(|&&b| b == 0 || cfg.grid_n % b != 0) {
        return Err(Error::NotDivisible {
            steps: cfg.grid_n,
            blocks: *b,
        });
    }
    let laws = cfg
        .alphas
        .iter()
        .map(|&a| StableLaw::from_symmetric(a, 1.0))
        .collect::<Result<Vec<_>>>()?;
    let parts = map_chunks(cfg.n_paths, cfg.threads, |range| -> Result<LemmaSuiteReport> {
        let mut rep = LemmaSuiteReport::default();
        let mut path = Vec::new();
        for i in range {
            let law = &laws[i % laws.len()];
            let mut rng = RngStream::replicate(cfg.master_seed, StreamDomain::Main, i as u64);
            fill_grid(law, cfg.grid_n, &mut rng, &mut path);
            rep.stable_paths += 1;
            for &p in &cfg.exponents {
                for &b in &cfg.blocks {
                    let w = lemma1_check(&path, p, b)?;
                    rep.block_checks += 1;
                    if !w.holds {
                        rep.block_violations += 1;
                    }
                    if w.rhs > 0.0 {
                        rep.max_block_ratio = rep.max_block_ratio.max(w.lhs / w.rhs);
                    }
                    let eps = block_pvars(&path, p, b)?.max_block().max(f64::MIN_POSITIVE);
                    let w = lemma2_check(&path, p, b, eps)?;
                    rep.vanishing_checks += 1;
                    rep.vanishing_premise_true += w.premise as usize;
                    rep.vanishing_violations += (!w.holds) as usize;
                }
            }

            let b = cfg.blocks[i % cfg.blocks.len()];
            let mut rng = RngStream::replicate(cfg.master_seed, StreamDomain::Auxiliary, i as u64);
            let synthetic = pinned_blocks(&mut rng, cfg.grid_n, b);
            rep.premise_paths += 1;
            for &p in &cfg.exponents {
                let eps = block_pvars(&synthetic, p, b)?.max_block();
                // also try a looser radius drawn above the tight one
                for eps in [eps, eps * (1.0 + rng.uniform())] {
                    let w = lemma2_check(&synthetic, p, b, eps)?;
                    rep.premise_checks += 1;
                    rep.premise_true += w.premise as usize;
                    rep.premise_violations += (!w.holds) as usize;
                    if w.premise {
                        rep.max_premise_ratio = rep.max_premise_ratio.max(w.lhs / w.rhs);
                    }
                }
            }
        }
        Ok(rep)
    });
    let mut total = LemmaSuiteReport::default();
    for part in parts {
        total.merge(&part?);
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenwoodReport {
    pub p: f64,
    pub n_paths: usize,
    /// Jump sets where the path variation and the jump power sum differ bitwise.
    pub identity_mismatches: usize,
    /// KS comparison of truncated power sums against exact draws, per η (decreasing).
    pub ks_by_eta: Vec<(f64, KsOutcome)>,
    pub ks_decreasing: bool,
    /// At p = 1, step paths whose jumps sit in distinct grid cells and whose
    /// total variation differs from Σ|jump| beyond rounding.
    pub step_path_checks: usize,
    pub step_path_mismatches: usize,
}

/// Checks ‖Z‖_p^p = S^p₁ on jump paths for α < p ≤ 1.
pub fn greenwood_identity_check(
    law: &StableLaw<f64>,
    p: f64,
    etas: &[f64],
    cfg: &MCConfig,
) -> Result<GreenwoodReport> {
    cfg.validate()?;
    if p > 1.0 {
        return Err(domain("p", p, "the jump identity needs p <= 1"));
    }
    if !(law.alpha() < p) {
        return Err(domain("p", p, "needs p > alpha"));
    }
    let mut etas = etas.to_vec();
    etas.sort_by(|a, b| b.total_cmp(a));
    let finest = *etas.last().ok_or_else(|| Error::Config("no truncation levels".into()))?;
    let sub = sp_law(law, p)?;

    struct Row {
        sums: Vec<f64>,
        mismatch: bool,
        step_checked: bool,
        step_mismatch: bool,
    }
    let rows = map_replicates(cfg.n_paths, cfg.threads, |i| -> Result<Row> {
        let mut rng = RngStream::replicate(cfg.master_seed, StreamDomain::Main, i as u64);
        let jumps = simulate_jumps(law, finest, &mut rng)?;
        let mismatch = jump_p_sum(&jumps, p).to_bits() != sp_from_jumps(&jumps, p).to_bits();
        let sums = etas.iter().map(|&e| sp_from_jumps(&jumps.restrict(e), p)).collect();
        let (mut step_checked, mut step_mismatch) = (false, false);
        if p == 1.0 {
            let n = cfg.grid_n;
            let cells: Vec<usize> = jumps.times().iter().map(|t| (t * n as f64).ceil() as usize).collect();
            if cells.windows(2).all(|w| w[0] < w[1]) {
                step_checked = true;
                let path = step_path_from_jumps(&jumps, n)?;
                let v = pvar_value(path.values(), 1.0)?;
                let s = jump_p_sum(&jumps, 1.0);
                step_mismatch = (v - s).abs() > 1e-12 * s.max(f64::MIN_POSITIVE);
            }
        }
        Ok(Row {
            sums,
            mismatch,
            step_checked,
            step_mismatch,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let direct = map_replicates(cfg.n_paths, cfg.threads, |i| {
        let mut rng = RngStream::replicate(cfg.master_seed, StreamDomain::Direct, i as u64);
        sample_one_sided(&sub, &mut rng)
    });
    let mut ks_by_eta = Vec::new();
    for (k, &eta) in etas.iter().enumerate() {
        let sample: Vec<f64> = rows.iter().map(|r| r.sums[k]).collect();
        ks_by_eta.push((eta, ks_two_sample(&sample, &direct, 0.001)?));
    }
    let ks_decreasing = ks_by_eta.windows(2).all(|w| w[1].1.statistic < w[0].1.statistic);
    Ok(GreenwoodReport {
        p,
        n_paths: cfg.n_paths,
        identity_mismatches: rows.iter().filter(|r| r.mismatch).count(),
        ks_by_eta,
        ks_decreasing,
        step_path_checks: rows.iter().filter(|r| r.step_checked).count(),
        step_path_mismatches: rows.iter().filter(|r| r.step_mismatch).count(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrictGapReport {
    pub p: f64,
    pub n_paths: usize,
    pub grid_n: usize,
    /// Paths with V < V_L + V_R beyond rounding (superadditivity failures).
    pub superadditivity_violations: usize,
    /// Paths with V > (V_L + V_R)(1 + tolerance).
    pub strict_gaps: usize,
    pub frequency: f64,
    /// Mean of (V − V_L − V_R)/V over paths with V > 0.
    pub mean_relative_gap: f64,
}

/// Frequency of a strict split gap at the midpoint, V > V_L + V_R.
pub fn strict_gap_test(law: &StableLaw<f64>, p: f64, cfg: &MCConfig) -> Result<StrictGapReport> {
    cfg.validate()?;
    if !(p >= 1.0 && p > law.alpha()) {
        return Err(domain("p", p, "needs p >= 1 and p > alpha"));
    }
    if cfg.grid_n % 2 != 0 {
        return Err(Error::NotDivisible {
            steps: cfg.grid_n,
            blocks: 2,
        });
    }
    let n = cfg.grid_n;
    let rows = map_chunks(cfg.n_paths, cfg.threads, |range| -> Result<Vec<(f64, f64)>> {
        let mut path = Vec::new();
        let mut out = Vec::with_capacity(range.len());
        for i in range {
            let mut rng = RngStream::replicate(cfg.master_seed, StreamDomain::Main, i as u64);
            fill_grid(law, n, &mut rng, &mut path);
            let whole = pvar_value(&path, p)?;
            let split = pvar_value(&path[..=n / 2], p)? + pvar_value(&path[n / 2..], p)?;
            out.push((whole, split));
        }
        Ok(out)
    });
    let mut violations = 0;
    let mut gaps = 0;
    let mut rel_sum = 0.0;
    let mut rel_count = 0usize;
    for part in rows {
        for (v, s) in part? {
            if v < s * (1.0 - <f64 as crate::scalar::Scalar>::rounding_slack()) {
                violations += 1;
            }
            if v > s * (1.0 + STRICT_GAP_TOLERANCE) {
                gaps += 1;
            }
            if v > 0.0 {
                rel_sum += (v - s) / v;
                rel_count += 1;
            }
        }
    }
    Ok(StrictGapReport {
        p,
        n_paths: cfg.n_paths,
        grid_n: n,
        superadditivity_violations: violations,
        strict_gaps: gaps,
        frequency: gaps as f64 / cfg.n_paths as f64,
        mean_relative_gap: if rel_count > 0 { rel_sum / rel_count as f64 } else { 0.0 },
    })
}

/// Where the variation draws for the stability test come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilitySource {
    /// V_p of simulated grid paths.
    GridPaths,
    /// Exact one-sided stable draws of S^p₁ (a control that is stable by construction).
    DirectJumpSum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityKsReport {
    pub source: StabilitySource,
    /// Stability index tested, α/p.
    pub index: f64,
    /// 2^{−1/index}, applied to the sum of two independent copies.
    pub scale: f64,
    pub ks: KsOutcome,
}

/// Two-sample KS between V and 2^{−p/α}(V¹ + V²) with independent copies.
///
/// An (α/p)-stable V passes; rejection witnesses that V is not stable.
pub fn scaled_sum_ks_test(
    law: &StableLaw<f64>,
    p: f64,
    source: StabilitySource,
    cfg: &MCConfig,
) -> Result<StabilityKsReport> {
    cfg.validate()?;
    if !(p >= 1.0 && p > law.alpha()) {
        return Err(domain("p", p, "needs p >= 1 and p > alpha"));
    }
    let index = law.alpha() / p;
    let scale = 2f64.powf(-index.recip());
    let draw = |domain: StreamDomain, i: usize| -> Result<f64> {
        let mut rng = RngStream::replicate(cfg.master_seed, domain, i as u64);
        match source {
            StabilitySource::GridPaths => {
                let mut path = Vec::new();
                fill_grid(law, cfg.grid_n, &mut rng, &mut path);
                pvar_value(&path, p)
            }
            StabilitySource::DirectJumpSum => Ok(sample_one_sided(&sp_law(law, p)?, &mut rng)),
        }
    };
    let single = map_replicates(cfg.n_paths, cfg.threads, |i| draw(StreamDomain::Main, i))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let paired = map_replicates(cfg.n_paths, cfg.threads, |i| -> Result<f64> {
        Ok(scale * (draw(StreamDomain::Pairing, 2 * i)? + draw(StreamDomain::Pairing, 2 * i + 1)?))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(StabilityKsReport {
        source,
        index,
        scale,
        ks: ks_two_sample(&single, &paired, 0.001)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubordinationBoundReport {
    pub p: f64,
    pub n_paths: usize,
    pub grid_n: usize,
    /// Paths with Σ_k |Z_{k/n} − Z_{(k−1)/n}|^p > H^p σ₁.
    pub increment_violations: usize,
    /// Paths whose full p-variation exceeds H^p σ₁.
    pub variation_violations: usize,
    /// Largest ratio of the p-variation to H^p σ₁.
    pub max_ratio: f64,
}

/// Pathwise bound Σ|ΔZ|^p ≤ H^p Σ|Δσ| for Z = W∘σ, H the (1/p)-Hölder
/// seminorm of the sampled Brownian path on [0, σ₁].
pub fn subordination_bound_check(alpha: f64, kappa: f64, p: f64, cfg: &MCConfig) -> Result<SubordinationBoundReport> {
    cfg.validate()?;
    if !(alpha < 2.0 && p > 2.0) {
        return Err(domain("p", p, "needs alpha < 2 < p"));
    }
    let slack = 1.0 + <f64 as crate::scalar::Scalar>::rounding_slack();
    let rows = map_replicates(cfg.n_paths, cfg.threads, |i| -> Result<(bool, bool, f64)> {
        let mut rng = RngStream::replicate(cfg.master_seed, StreamDomain::Main, i as u64);
        let path = simulate_subordinated(alpha, kappa, cfg.grid_n, &mut rng)?;
        let h = holder_on_times(&path.brownian_times, &path.brownian_values, p)?;
        let clock_total: f64 = path.clock.windows(2).map(|w| w[1] - w[0]).sum();
        let rhs = h.powf(p) * clock_total;
        let increments: f64 = path.composed.windows(2).map(|w| (w[1] - w[0]).abs().powf(p)).sum();
        let variation = pvar_value(&path.composed, p)?;
        let ratio = if rhs > 0.0 { variation / rhs } else { 0.0 };
        Ok((increments > rhs * slack, variation > rhs * slack, ratio))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(SubordinationBoundReport {
        p,
        n_paths: cfg.n_paths,
        grid_n: cfg.grid_n,
        increment_violations: rows.iter().filter(|r| r.0).count(),
        variation_violations: rows.iter().filter(|r| r.1).count(),
        max_ratio: rows.iter().map(|r| r.2).fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dp_suite_small() {
        let r = dp_oracle_suite(60, 1, 1e-12).unwrap();
        assert_eq!(r.mismatches, 0);
        assert_eq!(r.comparisons, 300);
    }

    #[test]
    fn pinned_paths_satisfy_premise() {
        let mut rng = RngStream::new(1, 0);
        let path = pinned_blocks(&mut rng, 64, 4);
        assert_eq!(path.len(), 65);
        for k in [0, 16, 32, 48, 64] {
            assert_eq!(path[k], 0.0);
        }
    }

    #[test]
    fn lemma_suite_small() {
        let cfg = LemmaSuiteConfig {
            n_paths: 40,
            grid_n: 64,
            threads: 1,
            ..LemmaSuiteConfig::default()
        };
        let r = lemma_suite(&cfg).unwrap();
        assert_eq!(r.violations(), 0);
        assert_eq!(r.premise_true, r.premise_checks);
    }

    #[test]
    fn monotone_subordinator_has_strict_gap() {
        let law = StableLaw::<f64>::from_subordinator(0.5, 1.0).unwrap();
        let cfg = MCConfig {
            n_paths: 50,
            grid_n: 64,
            threads: 1,
            ..MCConfig::default()
        };
        let r = strict_gap_test(&law, 2.0, &cfg).unwrap();
        assert_eq!(r.superadditivity_violations, 0);
        assert_eq!(r.strict_gaps, 50);
    }

    #[test]
    fn stability_control_is_deterministic() {
        let law = StableLaw::<f64>::from_symmetric(1.0, 1.0).unwrap();
        let cfg = MCConfig {
            n_paths: 2000,
            threads: 1,
            ..MCConfig::default()
        };
        let a = scaled_sum_ks_test(&law, 2.0, StabilitySource::DirectJumpSum, &cfg).unwrap();
        let b = scaled_sum_ks_test(&law, 2.0, StabilitySource::DirectJumpSum, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn subordination_bound_small() {
        let cfg = MCConfig {
            n_paths: 30,
            grid_n: 64,
            threads: 1,
            ..MCConfig::default()
        };
        let r = subordination_bound_check(1.0, 1.0, 3.0, &cfg).unwrap();
        assert_eq!(r.increment_violations + r.variation_violations, 0);
        assert!(r.max_ratio <= 1.0);
    }

    #[test]
    fn greenwood_identity_small() {
        let law = StableLaw::<f64>::from_levy_measure(0.5, 0.2, 0.3).unwrap();
        let cfg = MCConfig {
            n_paths: 200,
            grid_n: 1 << 16,
            threads: 1,
            ..MCConfig::default()
        };
        let r = greenwood_identity_check(&law, 1.0, &[1e-2, 1e-3], &cfg).unwrap();
        assert_eq!(r.identity_mismatches, 0);
        assert!(r.step_path_checks > 0);
        assert_eq!(r.step_path_mismatches, 0);
    }
}
