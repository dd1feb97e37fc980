//! Upper-tail diagnostics for V_p = ‖Z‖_p^p.

use super::MCConfig;
use crate::error::Result;
use crate::parallel::map_replicates;
use crate::rng::{RngStream, StreamDomain};
use crate::stable::{sample_one_sided, sp_law, StableLaw};
use crate::stats::{hill_estimate, TailEstimate};

/// Hill estimate of the tail exponent from the top `k` samples, with an
/// interval at the given confidence.
pub fn tail_index(samples: &[f64], k: usize, confidence: f64) -> Result<TailEstimate> {
    hill_estimate(samples, k, crate::stats::critical_value(confidence))
}

/// `cfg.n_paths` exact draws of S^p₁, whose tail exponent is α/p.
pub fn direct_sp_samples(law: &StableLaw<f64>, p: f64, cfg: &MCConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let sub = sp_law(law, p)?;
    Ok(map_replicates(cfg.n_paths, cfg.threads, |i| {
        let mut rng = RngStream::replicate(cfg.master_seed, StreamDomain::Direct, i as u64);
        sample_one_sided(&sub, &mut rng)
    }))
}
