//! Closed-form reference probabilities used to validate the Monte Carlo routes.

use crate::special::{erfc, ln_erfc, normal_cdf};

/// P[X ≤ x] for the one-sided 1/2-stable law with `E exp(−λX) = exp(−κ√λ)`:
/// erfc(κ / (2√x)).
pub fn levy_cdf(x: f64, kappa: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        erfc(kappa / (2.0 * x.sqrt()))
    }
}

/// ln P[X ≤ x] for the same law, accurate deep in the lower tail.
pub fn ln_levy_cdf(x: f64, kappa: f64) -> f64 {
    if x <= 0.0 {
        f64::NEG_INFINITY
    } else {
        ln_erfc(kappa / (2.0 * x.sqrt()))
    }
}

/// Terms of the theta series used for small radii.
pub const THETA_TERMS: usize = 10;

/// P[sup_{t≤1} |W_t| ≤ ε] for standard Brownian motion.
///
/// Uses (4/π) Σ (−1)^k/(2k+1) exp(−(2k+1)²π²/(8ε²)) for ε ≤ 1 and the
/// reflection sum Σ_k (−1)^k [Φ((2k+1)ε) − Φ((2k−1)ε)] above, where the
/// theta series would need many terms.
pub fn brownian_sup_probability(eps: f64) -> f64 {
    if eps <= 0.0 {
        return 0.0;
    }
    if eps <= 1.0 {
        let c = std::f64::consts::PI.powi(2) / (8.0 * eps * eps);
        let sum: f64 = (0..THETA_TERMS)
            .map(|k| {
                let odd = (2 * k + 1) as f64;
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign / odd * (-odd * odd * c).exp()
            })
            .sum();
        4.0 / std::f64::consts::PI * sum
    } else {
        let mut sum = 0.0;
        for k in -(THETA_TERMS as i64)..=THETA_TERMS as i64 {
            let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let hi = (2 * k + 1) as f64 * eps;
            let lo = (2 * k - 1) as f64 * eps;
            sum += sign * (normal_cdf(hi) - normal_cdf(lo));
        }
        sum
    }
}

/// ln P[sup_{t≤1} |W_t| ≤ ε] from the leading theta terms, stable for small ε.
pub fn ln_brownian_sup_probability(eps: f64) -> f64 {
    if eps > 0.5 {
        return brownian_sup_probability(eps).ln();
    }
    let c = std::f64::consts::PI.powi(2) / (8.0 * eps * eps);
    // factor out the leading exponential
    let rest: f64 = (0..THETA_TERMS)
        .map(|k| {
            let odd = (2 * k + 1) as f64;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign / odd * (-(odd * odd - 1.0) * c).exp()
        })
        .sum();
    (4.0 / std::f64::consts::PI).ln() - c + rest.ln()
}
