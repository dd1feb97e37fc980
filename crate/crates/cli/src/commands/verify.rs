use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use smallball::estimator::{dp_oracle_suite, laplace_mc, lemma_suite, subordination_bound_check, LemmaSuiteConfig};
use smallball::oracle::{brownian_sup_probability, ln_brownian_sup_probability};
use smallball::{estimate_smallball, MCConfig, SemiNorm, StableLaw64};

use super::tracked;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Dp,
    Lemmas,
    Laplace,
    Subordination,
    Gaussian,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Replicate count; each suite has its own pinned default.
    #[arg(long)]
    pub n_paths: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    #[serde(skip)]
    pub threads: usize,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }
}

fn dp(args: &VerifyArgs) -> CliResult<Vec<CheckOutcome>> {
    let r = dp_oracle_suite(args.n_paths.unwrap_or(1000), args.seed, 1e-12)?;
    Ok(vec![CheckOutcome::new(
        "dp_equals_bruteforce",
        r.mismatches == 0,
        format!(
            "{} comparisons, {} mismatches, max relative difference {:e}",
            r.comparisons, r.mismatches, r.max_relative_difference
        ),
    )])
}

fn lemmas(args: &VerifyArgs) -> CliResult<Vec<CheckOutcome>> {
    let cfg = LemmaSuiteConfig {
        n_paths: args.n_paths.unwrap_or(10_000),
        master_seed: args.seed,
        threads: args.threads,
        ..LemmaSuiteConfig::default()
    };
    let r = lemma_suite(&cfg)?;
    Ok(vec![
        CheckOutcome::new(
            "block_inequality",
            r.block_violations == 0,
            format!("{} checks, {} violations", r.block_checks, r.block_violations),
        ),
        CheckOutcome::new(
            "premise_implication",
            r.premise_violations + r.vanishing_violations == 0 && r.premise_true > 0,
            format!(
                "{} checks with premise true, {} violations; {} stable-path checks, {} violations",
                r.premise_true, r.premise_violations, r.vanishing_checks, r.vanishing_violations
            ),
        ),
    ])
}

fn laplace(args: &VerifyArgs) -> CliResult<Vec<CheckOutcome>> {
    let n_paths = args.n_paths.unwrap_or(1_000_000);
    let cfg = MCConfig {
        n_paths,
        master_seed: args.seed,
        eta: 1e-4,
        threads: args.threads,
        ..MCConfig::default()
    };
    let mut out = Vec::new();
    let cases = [(0.5, 1.0, vec![1.0]), (1.0, 2.0, vec![1.0, 4.0, 16.0])];
    for (alpha, p, lambdas) in cases {
        let law = StableLaw64::from_symmetric(alpha, 1.0)?;
        let r = laplace_mc(&law, p, &lambdas, &cfg)?;
        for pt in &r.points {
            let jump_ok = (pt.jump.mean - pt.exact).abs() <= 3.0 * pt.jump.se + 0.01 * pt.exact;
            let direct_ok = (pt.direct.mean - pt.exact).abs() <= 3.0 * pt.direct.se;
            out.push(CheckOutcome::new(
                format!("alpha={alpha} p={p} lambda={}", pt.lambda),
                jump_ok && direct_ok,
                format!(
                    "exact {:.6}, jump {:.6} ± {:.1e}, direct {:.6} ± {:.1e}",
                    pt.exact, pt.jump.mean, pt.jump.se, pt.direct.mean, pt.direct.se
                ),
            ));
        }
    }
    Ok(out)
}

fn subordination(args: &VerifyArgs) -> CliResult<Vec<CheckOutcome>> {
    let cfg = MCConfig {
        n_paths: args.n_paths.unwrap_or(10_000),
        grid_n: 1 << 10,
        master_seed: args.seed,
        threads: args.threads,
        ..MCConfig::default()
    };
    let r = subordination_bound_check(1.0, 1.0, 3.0, &cfg)?;
    Ok(vec![CheckOutcome::new(
        "pathwise_bound",
        r.increment_violations + r.variation_violations == 0,
        format!(
            "{} paths, {} increment and {} variation violations, max ratio {:.6}",
            r.n_paths, r.increment_violations, r.variation_violations, r.max_ratio
        ),
    )])
}

fn gaussian(args: &VerifyArgs) -> CliResult<Vec<CheckOutcome>> {
    let cfg = MCConfig {
        n_paths: args.n_paths.unwrap_or(1_000_000),
        grid_n: 1 << 14,
        master_seed: args.seed,
        epsilons: vec![0.5],
        threads: args.threads,
        ..MCConfig::default()
    };
    let law = StableLaw64::gaussian(1.0)?;
    let est = estimate_smallball(&law, SemiNorm::Sup, &cfg)?;
    let pt = &est.points[0];
    let oracle = brownian_sup_probability(0.5);
    let limit = std::f64::consts::PI.powi(2) / 8.0;
    let scaled = -0.04 * ln_brownian_sup_probability(0.2);
    Ok(vec![
        CheckOutcome::new(
            "sup_probability",
            (pt.p_hat - oracle).abs() <= 3.0 * pt.se + 0.05 * oracle,
            format!("estimate {:.6e} ± {:.1e}, series {:.6e}", pt.p_hat, pt.se, oracle),
        ),
        CheckOutcome::new(
            "rate_constant",
            (scaled - limit).abs() <= 0.1 * limit,
            format!("-eps^2 log P at eps = 0.2: {scaled:.6}, limit {limit:.6}"),
        ),
    ])
}

pub fn outcomes(args: &VerifyArgs) -> CliResult<Vec<CheckOutcome>> {
    match args.suite {
        Suite::Dp => dp(args),
        Suite::Lemmas => lemmas(args),
        Suite::Laplace => laplace(args),
        Suite::Subordination => subordination(args),
        Suite::Gaussian => gaussian(args),
    }
}

pub fn run(args: &VerifyArgs) -> CliResult<Vec<CheckOutcome>> {
    tracked("verify", args, Some(args.seed), args.out.as_deref(), |run| {
        let results = outcomes(args)?;
        run.write_json("verify.json", &results)?;
        for c in &results {
            println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        let failed = results.iter().filter(|c| !c.passed).count();
        if failed > 0 {
            return Err(CliError::Verification(format!("{failed} of {} checks failed", results.len())));
        }
        Ok(results)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(suite: Suite, n: usize) -> VerifyArgs {
        VerifyArgs {
            suite,
            n_paths: Some(n),
            seed: 0,
            threads: 1,
            out: None,
        }
    }

    #[test]
    fn small_dp_suite_passes() {
        assert!(outcomes(&args(Suite::Dp, 50)).unwrap().iter().all(|c| c.passed));
    }

    #[test]
    fn small_lemma_suite_passes() {
        assert!(outcomes(&args(Suite::Lemmas, 20)).unwrap().iter().all(|c| c.passed));
    }
}
