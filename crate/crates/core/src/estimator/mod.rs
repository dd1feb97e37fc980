//! Monte Carlo estimators and the statistical checks built on them.
//!
//! The estimators work in `f64`: they orchestrate samplers and semi-norms and
//! report probabilities, so the scalar type is fixed here.

pub mod checks;
pub mod laplace;
pub mod smallball;
pub mod tail;

use serde::{Deserialize, Serialize};

use crate::constants::rate_exponent;
use crate::error::{domain, Error, Result};
use crate::stable::StableLaw;
use crate::variation::{holder_seminorm, l2_norm, oscillation, pvar_value, sup_norm};

pub use checks::{
    dp_oracle_suite, greenwood_identity_check, lemma_suite, scaled_sum_ks_test, strict_gap_test,
    subordination_bound_check, DpSuiteReport, GreenwoodReport, LemmaSuiteConfig, LemmaSuiteReport,
    StabilityKsReport, StabilitySource, StrictGapReport, SubordinationBoundReport,
};
pub use laplace::{laplace_mc, LaplacePoint, LaplaceReport};
pub use smallball::{estimate_smallball, FitSummary, RefinedPoint, SmallBallEstimate, SmallBallPoint};
pub use tail::{direct_sp_samples, tail_index};

/// Monte Carlo run configuration. Replicate i always draws from the same
/// substream of `master_seed`, whatever `threads` is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MCConfig {
    pub n_paths: usize,
    pub grid_n: usize,
    pub master_seed: u64,
    /// Jump truncation level for the jump route.
    pub eta: f64,
    pub epsilons: Vec<f64>,
    pub lambdas: Vec<f64>,
    /// Worker threads; 0 uses every core.
    pub threads: usize,
    /// Confidence level of reported intervals.
    pub confidence: f64,
    /// Path construction; chosen from the law and semi-norm when absent.
    pub route: Option<Route>,
    /// Screen the ε list with a run of n_paths/100 replicates first.
    pub pilot: bool,
    /// Repeat grid-based runs at twice the grid size and flag moved estimates.
    pub refine_check: bool,
    /// For Brownian sup-norm events, weight each path by the probability
    /// that the Brownian bridges between grid nodes stay inside the ball.
    pub bridge_correction: bool,
}

impl Default for MCConfig {
    fn default() -> Self {
        Self {
            n_paths: 100_000,
            grid_n: 4096,
            master_seed: 0,
            eta: 1e-4,
            epsilons: Vec::new(),
            lambdas: Vec::new(),
            threads: 0,
            confidence: 0.999,
            route: None,
            pilot: true,
            refine_check: true,
            bridge_correction: true,
        }
    }
}

impl MCConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(domain("n_paths", 0.0, "at least one replicate"));
        }
        if self.grid_n < 2 {
            return Err(domain("grid_n", self.grid_n as f64, "grid_n >= 2"));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(domain("eta", self.eta, "truncation level must be positive"));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(domain("confidence", self.confidence, "must lie in (0, 1)"));
        }
        Ok(())
    }

    pub(crate) fn z(&self) -> f64 {
        crate::stats::critical_value(self.confidence)
    }
}

/// The semi-norm whose small balls are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SemiNorm {
    /// ‖Z‖_p = (strong p-variation)^{1/p}.
    PVariation { p: f64 },
    Sup,
    Oscillation,
    L2,
    /// Discrete (1/p)-Hölder seminorm.
    Holder { p: f64 },
}

impl SemiNorm {
    /// Value on a grid path with `n` steps.
    pub fn evaluate(&self, values: &[f64], n: usize) -> Result<f64> {
        Ok(match *self {
            SemiNorm::PVariation { p } => pvar_value(values, p)?.powf(p.recip()),
            SemiNorm::Sup => sup_norm(values),
            SemiNorm::Oscillation => oscillation(values),
            SemiNorm::L2 => l2_norm(values),
            SemiNorm::Holder { p } => holder_seminorm(values, p, n)?,
        })
    }

    /// Exponent γ of the small-ball rate −log P[‖Z‖ ≤ ε] ≍ ε^{−γ}.
    pub fn rate_exponent(&self, law: &StableLaw<f64>) -> Result<f64> {
        let alpha = law.alpha();
        match *self {
            SemiNorm::PVariation { p } => {
                if p < 1.0 {
                    return Err(Error::PureJumpRegime { p });
                }
                rate_exponent(alpha, p, law.is_subordinator_abs())
            }
            SemiNorm::Sup | SemiNorm::Oscillation | SemiNorm::L2 => Ok(alpha),
            SemiNorm::Holder { p } => {
                if !law.is_gaussian() {
                    return Err(Error::Config("Hölder small balls are implemented for alpha = 2 only".into()));
                }
                if !(p > 2.0) {
                    return Err(domain("p", p, "Brownian Hölder small balls need p > 2"));
                }
                Ok(2.0 * p / (p - 2.0))
            }
        }
    }
}

/// How replicate paths are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// i.i.d. stable increments on the grid.
    Grid,
    /// Brownian motion composed with an (α/2)-stable clock (symmetric laws).
    Subordination,
    /// Jumps above η; the p-variation for α < p ≤ 1 is their power sum.
    Jumps,
    /// ‖Z‖_p = |Z₁| when |Z| is a subordinator and p > 1.
    Endpoint,
}

impl Route {
    /// Default route for a law and semi-norm.
    pub fn select(law: &StableLaw<f64>, norm: &SemiNorm) -> Route {
        match *norm {
            _ if law.is_gaussian() => Route::Grid,
            SemiNorm::PVariation { p } if law.is_subordinator_abs() && p > 1.0 => Route::Endpoint,
            SemiNorm::PVariation { p } if law.alpha() < p && p <= 1.0 => Route::Jumps,
            _ => Route::Grid,
        }
    }

    /// Rejects combinations whose output would not represent the law.
    pub fn check(&self, law: &StableLaw<f64>, norm: &SemiNorm) -> Result<()> {
        match self {
            Route::Grid => Ok(()),
            Route::Subordination => {
                if law.is_gaussian() || !law.is_symmetric() {
                    Err(Error::Config("subordination needs a symmetric law with alpha < 2".into()))
                } else {
                    Ok(())
                }
            }
            Route::Jumps => {
                if law.alpha() < 1.0 {
                    Ok(())
                } else {
                    Err(Error::Config(
                        "the jump route drops the compensated small jumps; it needs alpha < 1".into(),
                    ))
                }
            }
            Route::Endpoint => match norm {
                SemiNorm::PVariation { p } if law.is_subordinator_abs() && *p > 1.0 => Ok(()),
                _ => Err(Error::Config(
                    "the endpoint shortcut needs a one-sided law and p-variation with p > 1".into(),
                )),
            },
        }
    }

    /// Whether the route depends on the grid size.
    pub fn uses_grid(&self, norm: &SemiNorm) -> bool {
        match self {
            Route::Grid | Route::Subordination => true,
            Route::Jumps => !matches!(norm, SemiNorm::PVariation { p } if *p <= 1.0),
            Route::Endpoint => false,
        }
    }
}
