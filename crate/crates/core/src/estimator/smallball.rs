//! Small-ball probability estimation and constant extraction.

use log::warn;
use serde::{Deserialize, Serialize};

use super::{MCConfig, Route, SemiNorm};
use crate::error::{Error, Result};
use crate::parallel::map_chunks;
use crate::path::{fill_grid, sample_truncated_power_sum, simulate_jumps, simulate_subordinated, step_path_from_jumps};
use crate::rng::{RngStream, StreamDomain};
use crate::stable::{sample_stable, StableLaw};
use crate::stats::{wilson_interval, MeanAccumulator};

/// Minimum number of hits for a constant estimate to be reported.
pub const MIN_HITS: u64 = 10;

/// Exponent beyond which a crossing term exp(−x) is treated as zero.
const NEGLIGIBLE_EXPONENT: f64 = 40.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallBallPoint {
    pub epsilon: f64,
    /// Replicates with a nonzero contribution.
    pub hits: u64,
    pub p_hat: f64,
    pub se: f64,
    /// Wilson interval for indicator estimates, normal interval for weighted ones.
    pub interval: (f64, f64),
    /// −ε^γ log p̂, reported once hits ≥ 10.
    pub k_hat: Option<f64>,
    pub k_interval: Option<(f64, f64)>,
    pub refined: Option<RefinedPoint>,
}

/// The same probability at twice the grid size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinedPoint {
    pub grid_n: usize,
    pub p_hat: f64,
    pub se: f64,
    /// The change exceeds the combined statistical error at the report's confidence.
    pub moved: bool,
}

/// Least-squares fit of log p̂ = −K ε^{−γ} + c over the reported points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub k: f64,
    pub offset: f64,
    pub points_used: usize,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallBallEstimate {
    pub law: StableLaw<f64>,
    pub seminorm: SemiNorm,
    pub route: Route,
    pub gamma: f64,
    pub n_paths: usize,
    pub grid_n: usize,
    pub weighted: bool,
    pub points: Vec<SmallBallPoint>,
    /// Plain grid indicator estimates when `points` are bridge-weighted.
    pub raw_grid_points: Option<Vec<SmallBallPoint>>,
    pub dropped_epsilons: Vec<f64>,
    pub fit: Option<FitSummary>,
    pub config: MCConfig,
}

/// Everything a replicate needs, shared read-only by the workers.
struct Replicator<'a> {
    law: &'a StableLaw<f64>,
    norm: SemiNorm,
    route: Route,
    grid_n: usize,
    eta: f64,
    epsilons: &'a [f64],
    bridge: bool,
}

/// Per-replicate output: weights per ε and the plain indicator per ε.
struct Scratch {
    path: Vec<f64>,
    weights: Vec<f64>,
    raw: Vec<f64>,
}

impl Scratch {
    fn new(k: usize) -> Self {
        Self {
            path: Vec::new(),
            weights: vec![0.0; k],
            raw: vec![0.0; k],
        }
    }
}

impl Replicator<'_> {
    fn weighted(&self) -> bool {
        self.bridge
    }

    /// Semi-norm value of one replicate path.
    fn value(&self, rng: &mut RngStream, path: &mut Vec<f64>) -> Result<f64> {
        let n = self.grid_n;
        match self.route {
            Route::Grid => {
                fill_grid(self.law, n, rng, path);
                self.norm.evaluate(path, n)
            }
            Route::Subordination => {
                let kappa = self.law.kappa().expect("symmetric laws carry kappa");
                let sub = simulate_subordinated(self.law.alpha(), kappa, n, rng)?;
                self.norm.evaluate(&sub.composed, n)
            }
            Route::Jumps => match self.norm {
                SemiNorm::PVariation { p } if p <= 1.0 => {
                    Ok(sample_truncated_power_sum(self.law, self.eta, p, rng)?.powf(p.recip()))
                }
                _ => {
                    let jumps = simulate_jumps(self.law, self.eta, rng)?;
                    let grid = step_path_from_jumps(&jumps, n)?;
                    self.norm.evaluate(grid.values(), n)
                }
            },
            Route::Endpoint => Ok(sample_stable(self.law, 1.0, rng).abs()),
        }
    }

    /// Fills the per-ε weights of one replicate and returns its semi-norm value
    /// (a lower bound on it when the path was abandoned early).
    fn replicate(&self, rng: &mut RngStream, scratch: &mut Scratch, early_stop: bool) -> Result<f64> {
        if self.bridge {
            return Ok(self.bridged_sup(rng, scratch, early_stop));
        }
        let v = self.value(rng, &mut scratch.path)?;
        for (k, &eps) in self.epsilons.iter().enumerate() {
            let w = if v <= eps { 1.0 } else { 0.0 };
            scratch.weights[k] = w;
            scratch.raw[k] = w;
        }
        Ok(v)
    }

    /// Brownian sup-norm event with bridge crossing weights between nodes.
    ///
    /// Given the grid values, the probability that the continuous path stays
    /// in (−ε, ε) on a step from x to y of variance s is, up to terms of
    /// order exp(−8ε²/s), 1 − exp(−2(ε−x)(ε−y)/s) − exp(−2(ε+x)(ε+y)/s).
    fn bridged_sup(&self, rng: &mut RngStream, scratch: &mut Scratch, early_stop: bool) -> f64 {
        let n = self.grid_n;
        let a = self.law.gauss_scale_a();
        let var = a * a / n as f64;
        let sd = var.sqrt();
        let eps_max = *self.epsilons.last().unwrap();
        scratch.weights.iter_mut().for_each(|w| *w = 1.0);
        let mut x = 0.0f64;
        let mut running = 0.0f64;
        for _ in 0..n {
            let y = x + sd * rng.normal();
            running = running.max(y.abs());
            if early_stop && running > eps_max {
                break;
            }
            for (k, &eps) in self.epsilons.iter().enumerate() {
                let w = &mut scratch.weights[k];
                if *w == 0.0 {
                    continue;
                }
                if y.abs() > eps {
                    *w = 0.0;
                    continue;
                }
                let upper = 2.0 * (eps - x) * (eps - y) / var;
                let lower = 2.0 * (eps + x) * (eps + y) / var;
                let mut stay = 1.0;
                if upper < NEGLIGIBLE_EXPONENT {
                    stay -= (-upper).exp();
                }
                if lower < NEGLIGIBLE_EXPONENT {
                    stay -= (-lower).exp();
                }
                *w *= stay.max(0.0);
            }
            x = y;
        }
        for (k, &eps) in self.epsilons.iter().enumerate() {
            let inside = running <= eps;
            scratch.raw[k] = if inside { 1.0 } else { 0.0 };
            if !inside {
                scratch.weights[k] = 0.0;
            }
        }
        running
    }

    /// Runs `n` replicates from `domain`; returns weighted and plain accumulators.
    fn run(&self, n: usize, threads: usize, seed: u64, domain: StreamDomain) -> Result<(Vec<MeanAccumulator>, Vec<MeanAccumulator>)> {
        let k = self.epsilons.len();
        let partials = map_chunks(n, threads, |range| -> Result<_> {
            let mut scratch = Scratch::new(k);
            let mut acc = vec![MeanAccumulator::new(); k];
            let mut raw = vec![MeanAccumulator::new(); k];
            for i in range {
                let mut rng = RngStream::replicate(seed, domain, i as u64);
                self.replicate(&mut rng, &mut scratch, true)?;
                for j in 0..k {
                    acc[j].add(scratch.weights[j]);
                    raw[j].add(scratch.raw[j]);
                }
            }
            Ok((acc, raw))
        });
        let mut acc = vec![MeanAccumulator::new(); k];
        let mut raw = vec![MeanAccumulator::new(); k];
        for part in partials {
            let (a, r) = part?;
            for j in 0..k {
                acc[j].merge(&a[j]);
                raw[j].merge(&r[j]);
            }
        }
        Ok((acc, raw))
    }
}

fn point(eps: f64, acc: &MeanAccumulator, weighted: bool, gamma: f64, z: f64) -> SmallBallPoint {
    let n = acc.count();
    let hits = acc.nonzero();
    let p_hat = acc.mean();
    let se = acc.std_error();
    let interval = if weighted {
        ((p_hat - z * se).max(0.0), (p_hat + z * se).min(1.0))
    } else {
        wilson_interval(hits, n, z)
    };
    let scale = eps.powf(gamma);
    let (k_hat, k_interval) = if hits >= MIN_HITS && p_hat > 0.0 {
        let k = -scale * p_hat.ln();
        // −ε^γ log(·) is decreasing, so the interval ends swap
        let lo = -scale * interval.1.ln();
        let hi = if interval.0 > 0.0 { -scale * interval.0.ln() } else { f64::MAX };
        (Some(k), Some((lo, hi)))
    } else {
        (None, None)
    };
    SmallBallPoint {
        epsilon: eps,
        hits,
        p_hat,
        se,
        interval,
        k_hat,
        k_interval,
        refined: None,
    }
}

fn fit(points: &[SmallBallPoint], gamma: f64) -> Option<FitSummary> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.hits >= MIN_HITS && p.p_hat > 0.0)
        .map(|p| (p.epsilon.powf(-gamma), p.p_hat.ln()))
        .collect();
    if usable.len() < 2 {
        return None;
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|u| u.0).sum::<f64>() / n;
    let my = usable.iter().map(|u| u.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|u| (u.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = usable.iter().map(|u| (u.0 - mx) * (u.1 - my)).sum();
    let slope = sxy / sxx;
    Some(FitSummary {
        k: -slope,
        offset: my - slope * mx,
        points_used: usable.len(),
        note: "heuristic: the offset absorbs pre-asymptotic corrections; no convergence rate is known".into(),
    })
}

/// Estimates P[‖Z‖ ≤ ε] for every ε in the configuration.
pub fn estimate_smallball(law: &StableLaw<f64>, norm: SemiNorm, cfg: &MCConfig) -> Result<SmallBallEstimate> {
    cfg.validate()?;
    let mut epsilons: Vec<f64> = cfg.epsilons.clone();
    if epsilons.is_empty() {
        return Err(Error::Config("no epsilon values given".into()));
    }
    if let Some(bad) = epsilons.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(crate::error::domain("epsilon", *bad, "radii must be positive"));
    }
    epsilons.sort_by(f64::total_cmp);
    epsilons.dedup();
    let gamma = norm.rate_exponent(law)?;
    let route = cfg.route.unwrap_or_else(|| Route::select(law, &norm));
    route.check(law, &norm)?;
    let bridge = cfg.bridge_correction && law.is_gaussian() && norm == SemiNorm::Sup && route == Route::Grid;

    let mut dropped = Vec::new();
    if cfg.pilot {
        let n_pilot = (cfg.n_paths / 100).max(1);
        let pilot = Replicator {
            law,
            norm,
            route,
            grid_n: cfg.grid_n,
            eta: cfg.eta,
            epsilons: &epsilons,
            bridge,
        };
        let k = epsilons.len();
        let chunks = map_chunks(n_pilot, cfg.threads, |range| -> Result<_> {
            let mut scratch = Scratch::new(k);
            let mut sums = vec![0.0; k];
            let mut values = Vec::with_capacity(range.len());
            for i in range {
                let mut rng = RngStream::replicate(cfg.master_seed, StreamDomain::Pilot, i as u64);
                values.push(pilot.replicate(&mut rng, &mut scratch, false)?);
                for j in 0..k {
                    sums[j] += scratch.weights[j];
                }
            }
            Ok((sums, values))
        });
        let mut sums = vec![0.0; k];
        let mut values = Vec::with_capacity(n_pilot);
        for part in chunks {
            let (s, v) = part?;
            sums.iter_mut().zip(&s).for_each(|(a, b)| *a += b);
            values.extend(v);
        }
        let scale = cfg.n_paths as f64 / n_pilot as f64;
        let mut kept = Vec::new();
        for (eps, s) in epsilons.iter().zip(&sums) {
            if s * scale >= MIN_HITS as f64 {
                kept.push(*eps);
            } else {
                warn!("epsilon {eps} dropped: pilot predicts {:.2} hits", s * scale);
                dropped.push(*eps);
            }
        }
        if kept.is_empty() {
            values.sort_by(f64::total_cmp);
            let rank = ((MIN_HITS as f64 / scale).ceil() as usize).clamp(1, values.len());
            return Err(Error::Infeasible {
                smallest_feasible: values[rank - 1],
                n_paths: cfg.n_paths,
            });
        }
        epsilons = kept;
    }

    let main = Replicator {
        law,
        norm,
        route,
        grid_n: cfg.grid_n,
        eta: cfg.eta,
        epsilons: &epsilons,
        bridge,
    };
    let z = cfg.z();
    let weighted = main.weighted();
    let (acc, raw) = main.run(cfg.n_paths, cfg.threads, cfg.master_seed, StreamDomain::Main)?;
    let mut points: Vec<SmallBallPoint> = epsilons
        .iter()
        .zip(&acc)
        .map(|(&eps, a)| point(eps, a, weighted, gamma, z))
        .collect();
    let raw_grid_points = weighted.then(|| {
        epsilons
            .iter()
            .zip(&raw)
            .map(|(&eps, a)| point(eps, a, false, gamma, z))
            .collect()
    });

    if cfg.refine_check && route.uses_grid(&norm) {
        let fine = Replicator {
            grid_n: 2 * cfg.grid_n,
            ..main
        };
        let (acc_fine, _) = fine.run(cfg.n_paths, cfg.threads, cfg.master_seed, StreamDomain::Refined)?;
        for (pt, a) in points.iter_mut().zip(&acc_fine) {
            let (p, se) = (a.mean(), a.std_error());
            let combined = (se * se + pt.se * pt.se).sqrt();
            pt.refined = Some(RefinedPoint {
                grid_n: 2 * cfg.grid_n,
                p_hat: p,
                se,
                moved: (p - pt.p_hat).abs() > z * combined,
            });
        }
    }

    let fit = fit(&points, gamma);
    Ok(SmallBallEstimate {
        law: *law,
        seminorm: norm,
        route,
        gamma,
        n_paths: cfg.n_paths,
        grid_n: cfg.grid_n,
        weighted,
        points,
        raw_grid_points,
        dropped_epsilons: dropped,
        fit,
        config: cfg.clone(),
    })
}
