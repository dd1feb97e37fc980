//! Gamma and complementary error functions.
//!
//! Gamma uses the Lanczos approximation (g = 7, nine terms) with the
//! reflection formula below 1/2. The complementary error function combines
//! the positive-term Maclaurin series of erf with a Lentz continued fraction
//! for the tail, and is also available in log form so that values far below
//! the smallest double remain usable.

use crate::scalar::{lit, Scalar};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum<T: Scalar>(xm1: T) -> T {
    let mut a: T = lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a = a + lit::<T>(c) / (xm1 + lit(i as f64));
    }
    a
}

/// Gamma function. Poles (non-positive integers) return NaN.
pub fn gamma<T: Scalar>(x: T) -> T {
    let half: T = lit(0.5);
    if x <= T::zero() && x == x.floor() {
        return T::nan();
    }
    if x < half {
        let pi = T::PI();
        return pi / ((pi * x).sin() * gamma(T::one() - x));
    }
    if x > lit(140.0) {
        return ln_gamma(x).exp();
    }
    if x == x.floor() && x <= lit(24.0) {
        let mut f = T::one();
        let mut k = lit::<T>(2.0);
        while k < x {
            f = f * k;
            k = k + T::one();
        }
        return f;
    }
    let xm1 = x - T::one();
    let t = xm1 + lit(LANCZOS_G) + half;
    let sqrt_two_pi = (T::TAU()).sqrt();
    sqrt_two_pi * t.powf(xm1 + half) * (-t).exp() * lanczos_sum(xm1)
}

/// Logarithm of |Γ(x)|. Poles return +∞.
pub fn ln_gamma<T: Scalar>(x: T) -> T {
    let half: T = lit(0.5);
    if x <= T::zero() && x == x.floor() {
        return T::infinity();
    }
    if x < half {
        let pi = T::PI();
        return (pi / (pi * x).sin().abs()).ln() - ln_gamma(T::one() - x);
    }
    let xm1 = x - T::one();
    let t = xm1 + lit(LANCZOS_G) + half;
    half * T::TAU().ln() + (xm1 + half) * t.ln() - t + lanczos_sum(xm1).ln()
}

/// erf(x) for moderate |x| via the positive-term series
/// erf(x) = 2x e^{-x²}/√π Σ (2x²)^n / (1·3···(2n+1)).
fn erf_series<T: Scalar>(x: T) -> T {
    let two_x2 = lit::<T>(2.0) * x * x;
    let mut term = T::one();
    let mut total = T::one();
    let mut n = 0usize;
    loop {
        n += 1;
        term = term * two_x2 / lit((2 * n + 1) as f64);
        total = total + term;
        if term <= total * T::epsilon() || n > 500 {
            break;
        }
    }
    lit::<T>(2.0) * x * (-x * x).exp() * total / T::PI().sqrt()
}

/// Continued fraction 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))) evaluated
/// with the modified Lentz method; erfc(x) = e^{-x²}/√π times this value.
fn erfc_fraction<T: Scalar>(x: T) -> T {
    let tiny = T::min_positive_value() * lit(1e10);
    let mut f = x;
    let mut c = x;
    let mut d = T::zero();
    for k in 1..5000 {
        let a: T = lit::<T>(k as f64) * lit(0.5);
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        let delta = c * d;
        f = f * delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    f.recip()
}

const SERIES_LIMIT: f64 = 2.0;

/// Complementary error function.
pub fn erfc<T: Scalar>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x < T::zero() {
        return lit::<T>(2.0) - erfc(-x);
    }
    if x < lit(SERIES_LIMIT) {
        T::one() - erf_series(x)
    } else {
        (-x * x).exp() / T::PI().sqrt() * erfc_fraction(x)
    }
}

/// Natural logarithm of erfc(x), accurate where erfc underflows.
pub fn ln_erfc<T: Scalar>(x: T) -> T {
    if x < lit(SERIES_LIMIT) {
        erfc(x).ln()
    } else {
        -x * x - lit::<T>(0.5) * T::PI().ln() + erfc_fraction(x).ln()
    }
}

/// Error function.
pub fn erf<T: Scalar>(x: T) -> T {
    if x.abs() < lit(SERIES_LIMIT) {
        erf_series(x)
    } else {
        T::one() - erfc(x)
    }
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal quantile by bisection on [`normal_cdf`].
pub fn normal_quantile(prob: f64) -> f64 {
    if !(0.0..=1.0).contains(&prob) {
        return f64::NAN;
    }
    if prob == 0.0 {
        return f64::NEG_INFINITY;
    }
    if prob == 1.0 {
        return f64::INFINITY;
    }
    let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < prob {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}
