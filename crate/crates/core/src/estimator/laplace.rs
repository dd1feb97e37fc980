//! Laplace transform of the jump power sum S^p₁, by jump simulation and by
//! direct one-sided stable sampling, against exp(−C λ^{α/p}).

use serde::{Deserialize, Serialize};

use super::MCConfig;
use crate::error::{domain, Result};
use crate::parallel::map_chunks;
use crate::path::sample_truncated_power_sum;
use crate::rng::{RngStream, StreamDomain};
use crate::stable::{sample_one_sided, sp_law, StableLaw};
use crate::stats::MeanAccumulator;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplacePoint {
    pub lambda: f64,
    pub exact: f64,
    /// E exp(−λ S^{p,η}₁) from jumps above η.
    pub jump: Estimate,
    /// E exp(−λ S^p₁) from exact one-sided stable draws.
    pub direct: Estimate,
    /// λ^{−α/p} log(·) of the two estimates (exactly −C in the limit); `None` at λ = 0.
    pub jump_rescaled_log: Option<Estimate>,
    pub direct_rescaled_log: Option<Estimate>,
    /// Upper bound on log(jump estimate target / exact): λ(c₋+c₊)η^{p−α}/(p−α).
    pub truncation_log_bias_bound: f64,
}

impl LaplacePoint {
    /// Upper bound on the relative truncation bias of the jump route.
    pub fn truncation_relative_bound(&self) -> f64 {
        self.truncation_log_bias_bound.exp_m1()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplaceReport {
    pub p: f64,
    /// Index α/p of S^p.
    pub index: f64,
    /// Laplace constant C of S^p₁.
    pub laplace_constant: f64,
    pub eta: f64,
    pub n_paths: usize,
    pub points: Vec<LaplacePoint>,
}

fn rescaled(e: Estimate, lambda: f64, index: f64) -> Option<Estimate> {
    if lambda <= 0.0 || e.mean <= 0.0 {
        return None;
    }
    let factor = lambda.powf(-index);
    Some(Estimate {
        mean: factor * e.mean.ln(),
        se: factor * e.se / e.mean,
    })
}

fn transform_run<F>(n: usize, lambdas: &[f64], threads: usize, draw: F) -> Result<Vec<Estimate>>
where
    F: Fn(usize) -> Result<f64> + Sync + Send,
{
    let parts = map_chunks(n, threads, |range| -> Result<Vec<MeanAccumulator>> {
        let mut acc = vec![MeanAccumulator::new(); lambdas.len()];
        for i in range {
            let s = draw(i)?;
            for (a, &l) in acc.iter_mut().zip(lambdas) {
                a.add((-l * s).exp());
            }
        }
        Ok(acc)
    });
    let mut acc = vec![MeanAccumulator::new(); lambdas.len()];
    for part in parts {
        for (a, b) in acc.iter_mut().zip(&part?) {
            a.merge(b);
        }
    }
    Ok(acc
        .iter()
        .map(|a| Estimate {
            mean: a.mean(),
            se: a.std_error(),
        })
        .collect())
}

/// Monte Carlo Laplace transforms of S^p₁ at each λ in `lambdas`.
pub fn laplace_mc(law: &StableLaw<f64>, p: f64, lambdas: &[f64], cfg: &MCConfig) -> Result<LaplaceReport> {
    cfg.validate()?;
    let sub = sp_law(law, p)?;
    if let Some(bad) = lambdas.iter().find(|l| !(**l >= 0.0 && l.is_finite())) {
        return Err(domain("lambda", *bad, "must be nonnegative"));
    }
    let eta = cfg.eta;
    let seed = cfg.master_seed;
    let jump = transform_run(cfg.n_paths, lambdas, cfg.threads, |i| {
        let mut rng = RngStream::replicate(seed, StreamDomain::Main, i as u64);
        sample_truncated_power_sum(law, eta, p, &mut rng)
    })?;
    let direct = transform_run(cfg.n_paths, lambdas, cfg.threads, |i| {
        let mut rng = RngStream::replicate(seed, StreamDomain::Direct, i as u64);
        Ok(sample_one_sided(&sub, &mut rng))
    })?;
    let alpha = law.alpha();
    let missing_mean = (law.c_minus() + law.c_plus()) * eta.powf(p - alpha) / (p - alpha);
    let points = lambdas
        .iter()
        .zip(jump.into_iter().zip(direct))
        .map(|(&lambda, (j, d))| LaplacePoint {
            lambda,
            exact: sub.laplace(lambda),
            jump: j,
            direct: d,
            jump_rescaled_log: rescaled(j, lambda, sub.alpha),
            direct_rescaled_log: rescaled(d, lambda, sub.alpha),
            truncation_log_bias_bound: lambda * missing_mean,
        })
        .collect();
    Ok(LaplaceReport {
        p,
        index: sub.alpha,
        laplace_constant: sub.kappa,
        eta,
        n_paths: cfg.n_paths,
        points,
    })
}
