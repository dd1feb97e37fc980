//! Strictly stable laws, their parametrizations, and exact samplers.
//!
//! The Lévy density coefficients (c₋, c₊) are canonical. For α < 2 and α ≠ 1
//! the drift of the Lévy–Itô decomposition truncated at 1 is forced by strict
//! stability, c₊ = c₋ + b(1 − α), i.e. b = (c₊ − c₋)/(1 − α). At α = 1 only
//! the symmetric case is supported, with a free drift.
//!
//! Samplers use the characteristic-function form
//! `E exp(iλZ₁) = exp(−σ^α |λ|^α (1 − iβ tan(πα/2) sgn λ))`, where
//! `β = (c₊ − c₋)/(c₊ + c₋)` and
//! `σ^α = (c₊ + c₋) π / (2 Γ(1 + α) sin(πα/2))`.
//! For a symmetric law σ^α is the κ of `E exp(iλZ₁) = exp(−κ|λ|^α)`, which
//! inverts `c± = α Γ(α) sin(πα/2) κ / π`. For a subordinator with
//! `E exp(−λZ₁) = exp(−κλ^α)` one has `c₊ = α κ / Γ(1 − α)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rng::RngStream;
use crate::scalar::{lit, to_f64, Scalar};
use crate::special::{gamma, ln_gamma};

/// A strictly stable law on ℝ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableLaw<T> {
    alpha: T,
    c_minus: T,
    c_plus: T,
    drift_b: T,
    gauss_scale_a: T,
    kappa: Option<T>,
    beta: T,
    scale: T,
}

/// One-sided stable law with `E exp(−λX) = exp(−κ λ^α)`, 0 < α < 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubordinatorLaw<T> {
    pub alpha: T,
    pub kappa: T,
}

fn check_alpha<T: Scalar>(alpha: T, upper: T, inclusive: bool, requirement: &'static str) -> Result<()> {
    let ok = alpha > T::zero() && if inclusive { alpha <= upper } else { alpha < upper };
    if ok && alpha.is_finite() {
        Ok(())
    } else {
        Err(domain("alpha", to_f64(alpha), requirement))
    }
}

fn check_positive<T: Scalar>(name: &'static str, x: T) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(domain(name, to_f64(x), "must be positive and finite"))
    }
}

/// `α Γ(α) sin(πα/2) / π`, the factor turning κ into c± for symmetric laws.
pub fn symmetric_density_factor<T: Scalar>(alpha: T) -> T {
    alpha * gamma(alpha) * (T::FRAC_PI_2() * alpha).sin() / T::PI()
}

impl<T: Scalar> StableLaw<T> {
    /// Symmetric law with `E exp(iλZ₁) = exp(−κ|λ|^α)`.
    pub fn from_symmetric(alpha: T, kappa: T) -> Result<Self> {
        check_alpha(alpha, lit(2.0), true, "symmetric laws need 0 < alpha <= 2")?;
        check_positive("kappa", kappa)?;
        if alpha == lit(2.0) {
            return Self::gaussian((lit::<T>(2.0) * kappa).sqrt());
        }
        let c = symmetric_density_factor(alpha) * kappa;
        let mut law = Self::from_levy_measure(alpha, c, c)?;
        law.kappa = Some(kappa);
        Ok(law)
    }

    /// Positive subordinator with `E exp(−λZ₁) = exp(−κλ^α)`.
    pub fn from_subordinator(alpha: T, kappa: T) -> Result<Self> {
        check_alpha(alpha, T::one(), false, "subordinators need 0 < alpha < 1")?;
        check_positive("kappa", kappa)?;
        let c_plus = alpha * kappa / gamma(T::one() - alpha);
        let mut law = Self::from_levy_measure(alpha, T::zero(), c_plus)?;
        law.kappa = Some(kappa);
        Ok(law)
    }

    /// Brownian motion scaled by `a` (α = 2, κ = a²/2).
    pub fn gaussian(a: T) -> Result<Self> {
        if a == T::zero() || !a.is_finite() {
            return Err(domain("gauss_scale_a", to_f64(a), "must be nonzero and finite"));
        }
        let kappa = a * a / lit(2.0);
        Ok(Self {
            alpha: lit(2.0),
            c_minus: T::zero(),
            c_plus: T::zero(),
            drift_b: T::zero(),
            gauss_scale_a: a,
            kappa: Some(kappa),
            beta: T::zero(),
            scale: kappa.sqrt(),
        })
    }

    /// Law with Lévy density `c₊ z^{−α−1}` on z > 0 and `c₋ |z|^{−α−1}` on z < 0.
    ///
    /// At α = 1 the coefficients must be equal; the drift is then zero and can
    /// be set with [`StableLaw::with_drift`].
    pub fn from_levy_measure(alpha: T, c_minus: T, c_plus: T) -> Result<Self> {
        check_alpha(alpha, lit(2.0), false, "jump laws need 0 < alpha < 2")?;
        if !(c_minus >= T::zero() && c_minus.is_finite()) {
            return Err(domain("c_minus", to_f64(c_minus), "must be nonnegative"));
        }
        if !(c_plus >= T::zero() && c_plus.is_finite()) {
            return Err(domain("c_plus", to_f64(c_plus), "must be nonnegative"));
        }
        let total = c_minus + c_plus;
        if total <= T::zero() {
            return Err(domain("c_minus + c_plus", 0.0, "must be positive (pure drift excluded)"));
        }
        if alpha == T::one() && c_minus != c_plus {
            return Err(domain(
                "c_plus - c_minus",
                to_f64(c_plus - c_minus),
                "alpha = 1 supports only the symmetric Lévy measure",
            ));
        }
        let drift_b = if alpha == T::one() {
            T::zero()
        } else {
            (c_plus - c_minus) / (T::one() - alpha)
        };
        let beta = (c_plus - c_minus) / total;
        let scale_pow = total * T::PI()
            / (lit::<T>(2.0) * gamma(T::one() + alpha) * (T::FRAC_PI_2() * alpha).sin());
        let scale = scale_pow.powf(alpha.recip());
        let kappa = if c_minus == c_plus {
            Some(scale_pow)
        } else if alpha < T::one() && (c_minus == T::zero() || c_plus == T::zero()) {
            Some(total * gamma(T::one() - alpha) / alpha)
        } else {
            None
        };
        Ok(Self {
            alpha,
            c_minus,
            c_plus,
            drift_b,
            gauss_scale_a: T::zero(),
            kappa,
            beta,
            scale,
        })
    }

    /// Sets the drift of a symmetric Cauchy law (α = 1).
    pub fn with_drift(mut self, b: T) -> Result<Self> {
        if self.alpha != T::one() {
            return Err(domain(
                "alpha",
                to_f64(self.alpha),
                "a free drift exists only at alpha = 1; otherwise strict stability fixes it",
            ));
        }
        self.drift_b = b;
        Ok(self)
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }
    pub fn c_minus(&self) -> T {
        self.c_minus
    }
    pub fn c_plus(&self) -> T {
        self.c_plus
    }
    pub fn drift_b(&self) -> T {
        self.drift_b
    }
    pub fn gauss_scale_a(&self) -> T {
        self.gauss_scale_a
    }
    /// κ of the symmetric (Fourier) or subordinator (Laplace) normalization;
    /// `None` for asymmetric two-sided laws, where no normalization is fixed.
    pub fn kappa(&self) -> Option<T> {
        self.kappa
    }
    /// Skewness (c₊ − c₋)/(c₊ + c₋); zero for α = 2.
    pub fn beta(&self) -> T {
        self.beta
    }
    /// σ of the characteristic-function form used by the samplers.
    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn is_gaussian(&self) -> bool {
        self.alpha == lit(2.0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.c_minus == self.c_plus && self.drift_b == T::zero()
    }

    /// Whether |Z| is a subordinator: α < 1 with one-sided jumps.
    pub fn is_subordinator_abs(&self) -> bool {
        self.alpha < T::one()
            && (self.c_minus == T::zero()) != (self.c_plus == T::zero())
    }

    /// Sign of a one-sided law (+1 increasing, −1 decreasing), if |Z| is a subordinator.
    pub fn monotone_sign(&self) -> Option<T> {
        if !self.is_subordinator_abs() {
            None
        } else if self.c_minus == T::zero() {
            Some(T::one())
        } else {
            Some(-T::one())
        }
    }

    /// `c₊ − c₋ − b(1 − α)`: zero for every law built by the constructors (α ≠ 1, α < 2).
    pub fn strict_stability_residual(&self) -> T {
        self.c_plus - self.c_minus - self.drift_b * (T::one() - self.alpha)
    }

    /// Mass of the Lévy measure outside [−η, η]: (c₋ + c₊)/(α η^α).
    pub fn tail_mass(&self, eta: T) -> T {
        (self.c_minus + self.c_plus) / (self.alpha * eta.powf(self.alpha))
    }

    /// The law of |Z₁| when |Z| is a subordinator.
    pub fn abs_subordinator(&self) -> Option<SubordinatorLaw<T>> {
        if self.is_subordinator_abs() {
            Some(SubordinatorLaw {
                alpha: self.alpha,
                kappa: self.kappa.expect("one-sided laws carry their Laplace constant"),
            })
        } else {
            None
        }
    }
}

/// Recovers κ from the jump coefficient of a symmetric law.
pub fn kappa_from_symmetric_c<T: Scalar>(alpha: T, c: T) -> T {
    c / symmetric_density_factor(alpha)
}

impl<T: Scalar> SubordinatorLaw<T> {
    pub fn new(alpha: T, kappa: T) -> Result<Self> {
        check_alpha(alpha, T::one(), false, "one-sided stable laws need 0 < alpha < 1")?;
        check_positive("kappa", kappa)?;
        Ok(Self { alpha, kappa })
    }

    /// `E exp(−λX) = exp(−κλ^α)`.
    pub fn laplace(&self, lambda: T) -> T {
        (-self.kappa * lambda.powf(self.alpha)).exp()
    }

    /// Jump coefficient c₊ = ακ/Γ(1 − α) of the matching subordinator.
    pub fn c_plus(&self) -> T {
        self.alpha * self.kappa / gamma(T::one() - self.alpha)
    }

    pub fn sample(&self, rng: &mut RngStream) -> T {
        sample_one_sided(self, rng)
    }
}

/// Law of S^p₁ = Σ_{s≤1} |ΔZ_s|^p: an (α/p)-stable subordinator with
/// Laplace constant ((c₋ + c₊)/α) Γ(1 − α/p).
pub fn sp_law<T: Scalar>(law: &StableLaw<T>, p: T) -> Result<SubordinatorLaw<T>> {
    if law.is_gaussian() {
        return Err(domain("alpha", 2.0, "S^p needs a jump law (alpha < 2)"));
    }
    if !(p > law.alpha()) {
        return Err(domain("p", to_f64(p), "S^p is finite only for p > alpha"));
    }
    let index = law.alpha() / p;
    let ln_c = (law.c_minus() + law.c_plus()).ln() - law.alpha().ln() + ln_gamma(T::one() - index);
    let kappa = ln_c.exp();
    if !kappa.is_finite() {
        return Err(Error::Divergent("Laplace constant of S^p overflows"));
    }
    Ok(SubordinatorLaw { alpha: index, kappa })
}

/// Kanter's representation of the standard one-sided law `exp(−λ^a)`.
fn kanter<T: Scalar>(a: T, rng: &mut RngStream) -> T {
    let u: T = lit::<T>(rng.uniform_open()) * T::PI();
    let e: T = lit(rng.exp1());
    let one_m = T::one() - a;
    let ln_x = (a * u).sin().ln() - u.sin().ln() / a + one_m / a * ((one_m * u).sin().ln() - e.ln());
    ln_x.exp()
}

/// Draw X ≥ 0 with `E exp(−λX) = exp(−C λ^{α'})`.
pub fn sample_one_sided<T: Scalar>(law: &SubordinatorLaw<T>, rng: &mut RngStream) -> T {
    law.kappa.powf(law.alpha.recip()) * kanter(law.alpha, rng)
}

/// Standard draw with `σ = 1` and skewness β (Chambers–Mallows–Stuck), α ≠ 1.
fn cms_standard<T: Scalar>(alpha: T, beta: T, rng: &mut RngStream) -> T {
    let half: T = lit(0.5);
    let v: T = (lit::<T>(rng.uniform_open()) - half) * T::PI();
    let w: T = lit(rng.exp1());
    let tan_term = beta * (T::FRAC_PI_2() * alpha).tan();
    let shift = tan_term.atan() / alpha;
    let stretch = (T::one() + tan_term * tan_term).powf(half / alpha);
    let av = alpha * (v + shift);
    stretch * av.sin() / v.cos().powf(alpha.recip())
        * ((v - av).cos() / w).powf((T::one() - alpha) / alpha)
}

/// One exact draw of Z_t.
pub fn sample_stable<T: Scalar>(law: &StableLaw<T>, t: T, rng: &mut RngStream) -> T {
    let alpha = law.alpha();
    if law.is_gaussian() {
        return law.gauss_scale_a() * t.sqrt() * lit(rng.normal());
    }
    if let Some(sub) = law.abs_subordinator() {
        let sign = law.monotone_sign().unwrap_or(T::one());
        let scaled = SubordinatorLaw {
            alpha,
            kappa: sub.kappa * t,
        };
        return sign * sample_one_sided(&scaled, rng);
    }
    if alpha == T::one() {
        let v: T = (lit::<T>(rng.uniform_open()) - lit(0.5)) * T::PI();
        return law.scale() * t * v.tan() + law.drift_b() * t;
    }
    law.scale() * t.powf(alpha.recip()) * cms_standard(alpha, law.beta(), rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn symmetric_cauchy_coefficients() {
        let law = StableLaw::<f64>::from_symmetric(1.0, 1.0).unwrap();
        assert!((law.c_plus() - 1.0 / PI).abs() < 1e-15);
        assert_eq!(law.c_plus(), law.c_minus());
        assert_eq!(law.drift_b(), 0.0);
        assert!((law.scale() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn symmetric_half_coefficients() {
        // Γ(3/2) sin(π/4)/π with Γ(3/2) = √π/2
        let expected = PI.sqrt() / 2.0 * (PI / 4.0).sin() / PI;
        let law = StableLaw::<f64>::from_symmetric(0.5, 1.0).unwrap();
        assert!((law.c_plus() - expected).abs() < 1e-15);
        assert!((law.c_plus() - 0.199_471_140_200_716_34).abs() < 1e-15);
    }

    #[test]
    fn gaussian_from_kappa() {
        let law = StableLaw::<f64>::from_symmetric(2.0, 0.5).unwrap();
        assert!((law.gauss_scale_a() - 1.0).abs() < 1e-15);
        assert!(law.is_gaussian());
        assert_eq!(law.kappa(), Some(0.5));
    }

    #[test]
    fn subordinator_coefficient() {
        let law = StableLaw::<f64>::from_subordinator(0.5, 1.0).unwrap();
        assert!((law.c_plus() - 0.282_094_791_773_878_14).abs() < 1e-15);
        assert_eq!(law.c_minus(), 0.0);
        assert!(law.is_subordinator_abs());
        assert_eq!(law.beta(), 1.0);
        // λ^{-α} log E e^{-λZ} = -c₊Γ(1-α)/α = -κ
        let k = law.c_plus() * gamma(0.5) / 0.5;
        assert!((k - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_domain() {
        assert!(StableLaw::<f64>::from_symmetric(0.0, 1.0).is_err());
        assert!(StableLaw::<f64>::from_symmetric(2.5, 1.0).is_err());
        assert!(StableLaw::<f64>::from_symmetric(1.0, 0.0).is_err());
        assert!(StableLaw::<f64>::from_symmetric(1.0, -1.0).is_err());
        assert!(StableLaw::<f64>::from_subordinator(1.0, 1.0).is_err());
        assert!(StableLaw::<f64>::from_subordinator(1.3, 1.0).is_err());
        assert!(StableLaw::<f64>::from_levy_measure(0.5, 0.0, 0.0).is_err());
        assert!(StableLaw::<f64>::from_levy_measure(1.0, 0.1, 0.3).is_err());
        assert!(StableLaw::<f64>::from_levy_measure(0.5, -0.1, 0.3).is_err());
        assert!(StableLaw::<f64>::gaussian(0.0).is_err());
    }

    #[test]
    fn drift_only_at_alpha_one() {
        let cauchy = StableLaw::<f64>::from_symmetric(1.0, 1.0).unwrap();
        let drifted = cauchy.with_drift(0.3).unwrap();
        assert_eq!(drifted.drift_b(), 0.3);
        assert!(!drifted.is_symmetric());
        let law = StableLaw::<f64>::from_symmetric(1.5, 1.0).unwrap();
        assert!(law.with_drift(0.3).is_err());
    }

    #[test]
    fn strict_stability_constraint_after_constructors() {
        let laws = [
            StableLaw::<f64>::from_symmetric(0.7, 2.0).unwrap(),
            StableLaw::<f64>::from_symmetric(1.6, 0.3).unwrap(),
            StableLaw::<f64>::from_subordinator(0.4, 1.7).unwrap(),
            StableLaw::<f64>::from_levy_measure(0.8, 0.2, 0.9).unwrap(),
            StableLaw::<f64>::from_levy_measure(1.4, 0.7, 0.1).unwrap(),
            StableLaw::<f64>::from_levy_measure(0.3, 0.6, 0.0).unwrap(),
        ];
        for law in laws {
            assert!(law.strict_stability_residual().abs() < 1e-14, "{law:?}");
        }
    }

    #[test]
    fn negative_subordinator_predicates() {
        let law = StableLaw::<f64>::from_levy_measure(0.3, 0.6, 0.0).unwrap();
        assert!(law.is_subordinator_abs());
        assert_eq!(law.monotone_sign(), Some(-1.0));
        let two_sided = StableLaw::<f64>::from_levy_measure(0.3, 0.6, 0.1).unwrap();
        assert!(!two_sided.is_subordinator_abs());
        assert_eq!(two_sided.kappa(), None);
        let heavy = StableLaw::<f64>::from_levy_measure(1.5, 0.0, 1.0).unwrap();
        assert!(!heavy.is_subordinator_abs());
    }

    #[test]
    fn kappa_round_trip() {
        for &alpha in &[0.1, 0.5, 0.9, 1.0, 1.3, 1.99] {
            for &kappa in &[0.01, 1.0, 37.0] {
                let law = StableLaw::<f64>::from_symmetric(alpha, kappa).unwrap();
                let back = kappa_from_symmetric_c(alpha, law.c_plus());
                assert!(((back - kappa) / kappa).abs() < 1e-12);
                // the characteristic-function scale reproduces κ as well
                let derived = StableLaw::<f64>::from_levy_measure(alpha, law.c_minus(), law.c_plus()).unwrap();
                let k2 = derived.kappa().unwrap();
                assert!(((k2 - kappa) / kappa).abs() < 1e-12, "alpha {alpha}");
            }
        }
    }

    #[test]
    fn subordinator_scale_matches_laplace_constant() {
        // σ^α = κ cos(πα/2) for a positive subordinator
        let law = StableLaw::<f64>::from_subordinator(0.6, 2.0).unwrap();
        let expected = 2.0 * (PI * 0.3).cos();
        assert!((law.scale().powf(0.6) - expected).abs() < 1e-13);
    }

    #[test]
    fn sp_law_symmetric_cauchy_p2() {
        let law = StableLaw::<f64>::from_symmetric(1.0, 1.0).unwrap();
        let s = sp_law(&law, 2.0).unwrap();
        assert_eq!(s.alpha, 0.5);
        assert!((s.kappa - 2.0 / PI.sqrt()).abs() < 1e-14);
        assert!((s.kappa - 1.128_379_167_095_512_6).abs() < 1e-14);
    }

    #[test]
    fn sp_law_subordinator_p1_is_identity() {
        let law = StableLaw::<f64>::from_subordinator(0.5, 1.0).unwrap();
        let s = sp_law(&law, 1.0).unwrap();
        assert!((s.kappa - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sp_law_large_p_limit() {
        let law = StableLaw::<f64>::from_symmetric(1.2, 0.7).unwrap();
        let limit = (law.c_minus() + law.c_plus()) / 1.2;
        let s = sp_law(&law, 1e7).unwrap();
        assert!(((s.kappa - limit) / limit).abs() < 1e-6);
    }

    #[test]
    fn sp_law_domain() {
        let law = StableLaw::<f64>::from_symmetric(1.0, 1.0).unwrap();
        assert!(sp_law(&law, 1.0).is_err());
        assert!(sp_law(&law, 0.5).is_err());
        let bm = StableLaw::<f64>::from_symmetric(2.0, 0.5).unwrap();
        assert!(sp_law(&bm, 3.0).is_err());
    }

    #[test]
    fn one_sided_samples_are_positive_and_finite() {
        let law = SubordinatorLaw::<f64>::new(0.2, 1.0).unwrap();
        let mut rng = RngStream::new(3, 0);
        for _ in 0..10_000 {
            let x = law.sample(&mut rng);
            assert!(x > 0.0 && x.is_finite());
        }
    }

    #[test]
    fn generic_over_f32() {
        let law = StableLaw::<f32>::from_symmetric(1.0, 1.0).unwrap();
        assert!((law.c_plus() - 1.0 / std::f32::consts::PI).abs() < 1e-6);
        let mut rng = RngStream::new(1, 1);
        let x = sample_stable(&law, 1.0_f32, &mut rng);
        assert!(x.is_finite());
    }
}
