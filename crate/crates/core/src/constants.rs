//! Closed-form small-ball exponents, constants and bounds.
//!
//! Powers such as x^{p/(p−α)} are evaluated as exponentials of log-space
//! products; the exponents get large near p → α and p → 2.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scalar::{lit, to_f64, Scalar};
use crate::special::{gamma, ln_gamma};
use crate::stable::{symmetric_density_factor, StableLaw};

/// Which closed-form regime a parameter set falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// |Z| is a subordinator and p > 1: ‖Z‖_p = |Z₁|.
    SubordinatorPGt1,
    /// α < p ≤ 1: ‖Z‖_p^p is the jump power sum S^p₁.
    PLe1,
    /// Everything else with p > α: only bounds are available.
    General,
}

impl Branch {
    pub fn classify(alpha: f64, p: f64, abs_subordinator: bool) -> Self {
        if abs_subordinator && alpha < 1.0 && p > 1.0 {
            Branch::SubordinatorPGt1
        } else if alpha < p && p <= 1.0 {
            Branch::PLe1
        } else {
            Branch::General
        }
    }
}

fn finite_or<T: Scalar>(x: T, what: &'static str) -> Result<T> {
    if x.is_finite() && x > T::zero() {
        Ok(x)
    } else {
        Err(Error::Divergent(what))
    }
}

/// Exponent γ in −log P[‖Z‖_p ≤ ε] ≍ ε^{−γ}.
pub fn rate_exponent<T: Scalar>(alpha: T, p: T, abs_subordinator: bool) -> Result<T> {
    if !(alpha > T::zero() && alpha <= lit(2.0)) {
        return Err(domain("alpha", to_f64(alpha), "0 < alpha <= 2"));
    }
    if abs_subordinator && alpha < T::one() && p > T::one() {
        return Ok(alpha / (T::one() - alpha));
    }
    if !(p > alpha) {
        return Err(domain("p", to_f64(p), "p <= alpha: the p-variation is infinite"));
    }
    if p.is_infinite() {
        return Ok(alpha);
    }
    Ok(p * alpha / (p - alpha))
}

/// `((p−α)/α)·(((c₋+c₊)/p)·Γ(1−α/p))^{p/(p−α)}` in log space.
fn jump_formula<T: Scalar>(alpha: T, p: T, total_c: T) -> Result<T> {
    let power = p / (p - alpha);
    let ln_base = total_c.ln() - p.ln() + ln_gamma(T::one() - alpha / p);
    let ln_value = ((p - alpha) / alpha).ln() + power * ln_base;
    finite_or(ln_value.exp(), "Gamma pole as p approaches alpha")
}

/// Exact small-ball constant where one is known in closed form.
pub fn closed_form_constant<T: Scalar>(law: &StableLaw<T>, p: T) -> Result<T> {
    let alpha = law.alpha();
    let total = law.c_minus() + law.c_plus();
    match Branch::classify(to_f64(alpha), to_f64(p), law.is_subordinator_abs()) {
        Branch::SubordinatorPGt1 => {
            // c₊Γ(1−α) = ακ; use κ directly when the law carries it
            let base = match law.kappa() {
                Some(kappa) => alpha * kappa,
                None => total * gamma(T::one() - alpha),
            };
            let value = (alpha.recip() - T::one()) * base.powf((T::one() - alpha).recip());
            finite_or(value, "exponent 1/(1 - alpha) as alpha approaches 1")
        }
        Branch::PLe1 => jump_formula(alpha, p, total),
        Branch::General => {
            if !(p > alpha) {
                Err(domain("p", to_f64(p), "p <= alpha: the p-variation is infinite"))
            } else {
                Err(Error::NoClosedForm(
                    "p > max(1, alpha) outside the subordinator case has only bounds",
                ))
            }
        }
    }
}

/// Lower bound on the small-ball constant from the jump power sum, p ≥ 1, p > α.
pub fn jump_lower_bound<T: Scalar>(law: &StableLaw<T>, p: T) -> Result<T> {
    if law.is_gaussian() {
        return Err(domain("alpha", 2.0, "the jump bound needs alpha < 2"));
    }
    if !(p >= T::one() && p > law.alpha() && p.is_finite()) {
        return Err(domain("p", to_f64(p), "needs p >= 1 and p > alpha"));
    }
    jump_formula(law.alpha(), p, law.c_minus() + law.c_plus())
}

fn check_symmetric_args<T: Scalar>(alpha: T, kappa: T) -> Result<()> {
    if !(alpha > T::zero() && alpha < lit(2.0)) {
        return Err(domain("alpha", to_f64(alpha), "needs 0 < alpha < 2"));
    }
    if !(kappa > T::zero() && kappa.is_finite()) {
        return Err(domain("kappa", to_f64(kappa), "must be positive"));
    }
    Ok(())
}

/// Lower bound for symmetric laws written in terms of κ (the jump bound with
/// c± expressed through κ).
pub fn symmetric_lower_bound<T: Scalar>(alpha: T, p: T, kappa: T) -> Result<T> {
    check_symmetric_args(alpha, kappa)?;
    if !(p > alpha && p.is_finite()) {
        return Err(domain("p", to_f64(p), "needs p > alpha"));
    }
    let power = p / (p - alpha);
    let ln_base = (lit::<T>(2.0) * symmetric_density_factor(alpha)).ln() - p.ln()
        + ln_gamma(T::one() - alpha / p)
        + kappa.ln();
    finite_or(
        (((p - alpha) / alpha).ln() + power * ln_base).exp(),
        "Gamma pole as p approaches alpha",
    )
}

/// Offset from the subordinating clock in the upper bound for symmetric laws:
/// ((2−α)/2)·α^{α/(2−α)}·κ^{2/(2−α)}.
pub fn subordination_offset<T: Scalar>(alpha: T, kappa: T) -> Result<T> {
    check_symmetric_args(alpha, kappa)?;
    let two = lit::<T>(2.0);
    let ln_value = ((two - alpha) / two).ln() + alpha / (two - alpha) * alpha.ln()
        + two / (two - alpha) * kappa.ln();
    finite_or(ln_value.exp(), "exponent 2/(2 - alpha) as alpha approaches 2")
}

/// max_{x>0} (a x^q − b x^r) = (1/q − 1/r)(qa)^{r/(r−q)}(rb)^{q/(q−r)}, 1 < q < r.
pub fn power_gap_max<T: Scalar>(q: T, r: T, a: T, b: T) -> Result<T> {
    if !(q > T::one() && r > q && r.is_finite()) {
        return Err(domain("q, r", to_f64(q), "needs 1 < q < r"));
    }
    if !(a > T::zero() && a.is_finite()) {
        return Err(domain("a", to_f64(a), "must be positive"));
    }
    if !(b > T::zero() && b.is_finite()) {
        return Err(domain("b", to_f64(b), "must be positive"));
    }
    let ln_value = (q.recip() - r.recip()).ln()
        + r / (r - q) * (q * a).ln()
        + q / (q - r) * (r * b).ln();
    Ok(ln_value.exp())
}

/// Result of the lower-bound maximization for the Brownian Hölder constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderBound<T> {
    pub value: T,
    /// Stability index at which the inner maximum is attained.
    pub argmax_alpha: T,
}

/// Points in the coarse scan before golden-section refinement.
const COARSE_POINTS: usize = 200;
/// Distance kept from the ends of (0, 2).
const ALPHA_MARGIN: f64 = 1e-6;
const ALPHA_TOLERANCE: f64 = 1e-10;

/// Log of the inner objective: (2p/(α(p−2)))·ln(Γ((1+α)/2)Γ(1−α/p)/(Γ(1/2)Γ(1−α/2))).
fn holder_objective_ln<T: Scalar>(alpha: T, p: T) -> T {
    let two = lit::<T>(2.0);
    let half = lit::<T>(0.5);
    let ln_ratio = ln_gamma((T::one() + alpha) / two) + ln_gamma(T::one() - alpha / p)
        - ln_gamma(half)
        - ln_gamma(T::one() - alpha / two);
    two * p / (alpha * (p - two)) * ln_ratio
}

/// Lower bound on the Brownian (1/p)-Hölder small-ball constant, p > 2,
/// obtained by maximizing the symmetric bounds' gap over (α, κ).
pub fn holder_lower_bound<T: Scalar>(p: T) -> Result<HolderBound<T>> {
    let two = lit::<T>(2.0);
    if !(p > two && p.is_finite()) {
        return Err(domain("p", to_f64(p), "needs p > 2"));
    }
    let lo = lit::<T>(ALPHA_MARGIN);
    let hi = two - lo;
    let step = (hi - lo) / lit(COARSE_POINTS as f64 - 1.0);
    let grid = |k: usize| lo + step * lit(k as f64);
    let best_k = (0..COARSE_POINTS)
        .max_by(|&a, &b| {
            holder_objective_ln(grid(a), p)
                .partial_cmp(&holder_objective_ln(grid(b), p))
                .expect("objective is finite inside (0, 2)")
        })
        .unwrap();
    let mut a = grid(best_k.saturating_sub(1));
    let mut b = grid((best_k + 1).min(COARSE_POINTS - 1));
    let inv_phi = (lit::<T>(5.0).sqrt() - T::one()) / two;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = holder_objective_ln(x1, p);
    let mut f2 = holder_objective_ln(x2, p);
    let tol = lit::<T>(ALPHA_TOLERANCE);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = holder_objective_ln(x2, p);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = holder_objective_ln(x1, p);
        }
        // f32 cannot resolve 1e-10; stop once the bracket stops shrinking
        if x1 >= x2 {
            break;
        }
    }
    let argmax_alpha = (a + b) / two;
    let ln_prefactor = ((p - two) / p).ln() + two / (two - p) * p.ln()
        + (p + two) / (p - two) * two.ln();
    let value = (ln_prefactor + holder_objective_ln(argmax_alpha, p)).exp();
    Ok(HolderBound {
        value: finite_or(value, "Hölder bound overflow")?,
        argmax_alpha,
    })
}

/// Brownian small-ball constants for `E exp(iλW₁) = exp(−κλ²)`; κ = 1/2 is
/// standard Brownian motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianConstants<T> {
    pub kappa: T,
    /// −ε² log P[sup|W| ≤ ε] → π²κ/4 (π²/8 for standard BM).
    pub sup: T,
    /// −ε² log P[osc W ≤ ε] → π²κ (π²/2 for standard BM).
    pub oscillation: T,
    /// −ε² log P[‖W‖_{L2} ≤ ε] → κ/4.
    pub l2: T,
}

pub fn gaussian_constants<T: Scalar>(kappa: T) -> Result<GaussianConstants<T>> {
    if !(kappa > T::zero() && kappa.is_finite()) {
        return Err(domain("kappa", to_f64(kappa), "must be positive"));
    }
    let pi2 = T::PI() * T::PI();
    Ok(GaussianConstants {
        kappa,
        sup: pi2 * kappa / lit(4.0),
        oscillation: pi2 * kappa,
        l2: kappa / lit(4.0),
    })
}

/// Every constant that applies to one (α, p, κ) parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport<T> {
    pub alpha: T,
    pub p: T,
    pub kappa: T,
    pub abs_subordinator: bool,
    pub branch: Branch,
    pub rate_exponent: T,
    pub closed_form_constant: Option<T>,
    pub jump_lower_bound: Option<T>,
    pub symmetric_lower_bound: Option<T>,
    pub subordination_offset: Option<T>,
    /// Upper end of the symmetric bracket, Hölder lower bound plus offset.
    pub symmetric_upper_bound_floor: Option<T>,
    pub holder_lower_bound: Option<HolderBound<T>>,
    /// [lower bound, configured upper bound] for the Brownian Hölder constant.
    pub holder_constant_interval: Option<(T, Option<T>)>,
    pub gaussian: Option<GaussianConstants<T>>,
    pub notes: Vec<String>,
}

/// Evaluates everything defined for the parameters; `holder_upper` is an
/// externally known upper bound for the Brownian Hölder constant, if any.
pub fn constants_report<T: Scalar>(
    alpha: T,
    p: T,
    kappa: T,
    abs_subordinator: bool,
    holder_upper: Option<T>,
) -> Result<ConstantsReport<T>> {
    let law = if abs_subordinator {
        StableLaw::from_subordinator(alpha, kappa)?
    } else {
        StableLaw::from_symmetric(alpha, kappa)?
    };
    let rate = rate_exponent(alpha, p, abs_subordinator)?;
    let branch = Branch::classify(to_f64(alpha), to_f64(p), abs_subordinator);
    let mut notes = Vec::new();
    let closed = match closed_form_constant(&law, p) {
        Ok(v) => Some(v),
        Err(Error::NoClosedForm(why)) => {
            notes.push(format!("closed-form constant unavailable: {why}"));
            None
        }
        Err(e) => return Err(e),
    };
    let gaussian_law = law.is_gaussian();
    let jump = if !gaussian_law && p >= T::one() {
        Some(jump_lower_bound(&law, p)?)
    } else {
        None
    };
    let (sym, offset) = if !abs_subordinator && !gaussian_law {
        (Some(symmetric_lower_bound(alpha, p, kappa)?), Some(subordination_offset(alpha, kappa)?))
    } else {
        (None, None)
    };
    let two = lit::<T>(2.0);
    let holder = if p > two && p.is_finite() {
        Some(holder_lower_bound(p)?)
    } else {
        None
    };
    let symmetric_upper_bound_floor = match (offset, holder) {
        (Some(d), Some(h)) => {
            notes.push(
                "the symmetric upper bound is (Hölder constant + offset); only its floor is known".into(),
            );
            Some(h.value + d)
        }
        _ => None,
    };
    let holder_constant_interval = holder.map(|h| (h.value, holder_upper));
    if holder.is_some() && holder_upper.is_none() {
        notes.push("no upper bound configured for the Brownian Hölder constant".into());
    }
    let gaussian = if gaussian_law {
        notes.push("Gaussian constants use kappa; kappa = 1/2 is standard Brownian motion".into());
        Some(gaussian_constants(kappa)?)
    } else {
        None
    };
    Ok(ConstantsReport {
        alpha,
        p,
        kappa,
        abs_subordinator,
        branch,
        rate_exponent: rate,
        closed_form_constant: closed,
        jump_lower_bound: jump,
        symmetric_lower_bound: sym,
        subordination_offset: offset,
        symmetric_upper_bound_floor,
        holder_lower_bound: holder,
        holder_constant_interval,
        gaussian,
        notes,
    })
}
