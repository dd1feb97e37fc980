//! Discrete sample paths on [0, 1]: i.i.d. grid increments, truncated jump
//! reconstruction, and Brownian motion time-changed by a one-sided stable clock.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rng::RngStream;
use crate::scalar::{from_usize, lit, to_f64, Scalar};
use crate::stable::{sample_one_sided, sample_stable, StableLaw, SubordinatorLaw};
use crate::sum::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMethod {
    GridIncrements,
    JumpReconstruction,
    Subordination,
}

/// Values at k/n, k = 0..=n, with how they were produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathGrid<T> {
    values: Vec<T>,
    pub method: PathMethod,
    pub master_seed: Option<u64>,
    pub stream_id: Option<u64>,
}

impl<T: Scalar> PathGrid<T> {
    /// Wraps raw values; the first must be zero and all must be finite.
    pub fn from_values(values: Vec<T>, method: PathMethod) -> Result<Self> {
        if values.len() < 2 {
            return Err(domain("len", values.len() as f64, "a path needs at least two nodes"));
        }
        if values[0] != T::zero() {
            return Err(domain("values[0]", to_f64(values[0]), "paths start at zero"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(domain("value", to_f64(*bad), "path values must be finite"));
        }
        Ok(Self {
            values,
            method,
            master_seed: None,
            stream_id: None,
        })
    }

    fn with_provenance(mut self, rng: &RngStream) -> Self {
        self.master_seed = Some(rng.master_seed());
        self.stream_id = Some(rng.stream_id());
        self
    }

    /// Number of grid steps.
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn endpoint(&self) -> T {
        self.values[self.n()]
    }

    /// Time of node k, k/n.
    pub fn time(&self, k: usize) -> T {
        from_usize::<T>(k) / from_usize::<T>(self.n())
    }
}

/// Fills `out` with a grid path of `n` i.i.d. increments distributed as n^{−1/α} Z₁.
pub fn fill_grid<T: Scalar>(law: &StableLaw<T>, n: usize, rng: &mut RngStream, out: &mut Vec<T>) {
    out.clear();
    out.reserve(n + 1);
    let step = from_usize::<T>(n).powf(-law.alpha().recip());
    let mut acc = T::zero();
    out.push(acc);
    for _ in 0..n {
        acc = acc + step * sample_stable(law, T::one(), rng);
        out.push(acc);
    }
}

pub fn simulate_grid<T: Scalar>(law: &StableLaw<T>, n: usize, rng: &mut RngStream) -> Result<PathGrid<T>> {
    if n == 0 {
        return Err(domain("n", 0.0, "grid size must be at least 1"));
    }
    let mut values = Vec::new();
    fill_grid(law, n, rng, &mut values);
    Ok(PathGrid {
        values,
        method: PathMethod::GridIncrements,
        master_seed: None,
        stream_id: None,
    }
    .with_provenance(rng))
}

/// Jumps of absolute size above `eta` on (0, 1], in time order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpSet<T> {
    times: Vec<T>,
    sizes: Vec<T>,
    eta: T,
}

impl<T: Scalar> JumpSet<T> {
    /// Builds a jump set, checking time order and the truncation level.
    pub fn new(times: Vec<T>, sizes: Vec<T>, eta: T) -> Result<Self> {
        if times.len() != sizes.len() {
            return Err(Error::Config(format!(
                "{} jump times but {} jump sizes",
                times.len(),
                sizes.len()
            )));
        }
        if !(eta > T::zero()) {
            return Err(domain("eta", to_f64(eta), "truncation level must be positive"));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("jump times must be strictly increasing".into()));
        }
        if let Some(t) = times.iter().find(|&&t| !(t > T::zero() && t <= T::one())) {
            return Err(domain("jump time", to_f64(*t), "jump times lie in (0, 1]"));
        }
        if let Some(z) = sizes.iter().find(|&&z| !(z.abs() > eta)) {
            return Err(domain("jump size", to_f64(*z), "every jump exceeds the truncation level"));
        }
        Ok(Self { times, sizes, eta })
    }

    pub fn empty(eta: T) -> Self {
        Self {
            times: Vec::new(),
            sizes: Vec::new(),
            eta,
        }
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn sizes(&self) -> &[T] {
        &self.sizes
    }

    pub fn eta(&self) -> T {
        self.eta
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    /// Σ |size|^p with compensated accumulation.
    pub fn power_sum(&self, p: T) -> T {
        self.sizes.iter().map(|z| z.abs().powf(p)).collect::<CompensatedSum<T>>().value()
    }

    /// The jumps above a coarser level `eta`, as the same path would have produced them.
    pub fn restrict(&self, eta: T) -> Self {
        let eta = eta.max(self.eta);
        let (times, sizes) = self
            .times
            .iter()
            .zip(&self.sizes)
            .filter(|(_, z)| z.abs() > eta)
            .map(|(t, z)| (*t, *z))
            .unzip();
        Self { times, sizes, eta }
    }
}

fn check_jump_law<T: Scalar>(law: &StableLaw<T>, eta: T) -> Result<()> {
    if law.is_gaussian() {
        return Err(domain("alpha", 2.0, "jump construction needs alpha < 2"));
    }
    if !(eta > T::zero() && eta.is_finite()) {
        return Err(domain("eta", to_f64(eta), "truncation level must be positive"));
    }
    Ok(())
}

/// Jumps of Z on [0, 1] larger than `eta` in absolute value.
///
/// Draw order: Poisson count, then (sign, size) per jump, then the times.
pub fn simulate_jumps<T: Scalar>(law: &StableLaw<T>, eta: T, rng: &mut RngStream) -> Result<JumpSet<T>> {
    check_jump_law(law, eta)?;
    let eta_f = to_f64(eta);
    let alpha = to_f64(law.alpha());
    let total = to_f64(law.c_minus() + law.c_plus());
    let up = to_f64(law.c_plus()) / total;
    let count = rng.poisson(total / (alpha * eta_f.powf(alpha))) as usize;
    let two_sided = law.c_minus() > T::zero() && law.c_plus() > T::zero();
    let mut sizes = Vec::with_capacity(count);
    for _ in 0..count {
        let positive = if two_sided { rng.uniform() < up } else { up > 0.0 };
        let size = loop {
            // rounding can land exactly on eta; redraw to keep the bound strict
            let z: T = lit(eta_f * rng.uniform_open().powf(-alpha.recip()));
            if z > eta {
                break z;
            }
        };
        sizes.push(if positive { size } else { -size });
    }
    let mut times: Vec<f64> = (0..count).map(|_| 1.0 - rng.uniform()).collect();
    times.sort_by(f64::total_cmp);
    let times: Vec<T> = times.into_iter().map(lit).collect();
    Ok(JumpSet { times, sizes, eta })
}

/// Σ |ΔZ|^p over jumps above `eta`, drawn without materializing the jump set.
///
/// Same law as `sp_from_jumps(simulate_jumps(..))`; used where only the sum
/// matters and the jump count is large.
pub fn sample_truncated_power_sum<T: Scalar>(
    law: &StableLaw<T>,
    eta: T,
    p: T,
    rng: &mut RngStream,
) -> Result<T> {
    check_jump_law(law, eta)?;
    let eta_f = to_f64(eta);
    let alpha = to_f64(law.alpha());
    let total = to_f64(law.c_minus() + law.c_plus());
    let count = rng.poisson(total / (alpha * eta_f.powf(alpha)));
    let pf = to_f64(p);
    let exponent = -pf / alpha;
    let mut acc = CompensatedSum::new();
    if exponent == -1.0 {
        for _ in 0..count {
            acc.add(rng.uniform_open().recip());
        }
    } else if exponent == -2.0 {
        for _ in 0..count {
            let u = rng.uniform_open();
            acc.add((u * u).recip());
        }
    } else {
        for _ in 0..count {
            acc.add(rng.uniform_open().powf(exponent));
        }
    }
    Ok(lit(eta_f.powf(pf) * acc.value()))
}

/// S^{p,η}₁: the p-th power sum of the recorded jumps.
pub fn sp_from_jumps<T: Scalar>(jumps: &JumpSet<T>, p: T) -> T {
    jumps.power_sum(p)
}

/// Right-continuous step path of the recorded jumps at the nodes k/n.
pub fn step_path_from_jumps<T: Scalar>(jumps: &JumpSet<T>, n: usize) -> Result<PathGrid<T>> {
    if n == 0 {
        return Err(domain("n", 0.0, "grid size must be at least 1"));
    }
    let nf = from_usize::<T>(n);
    let mut values = Vec::with_capacity(n + 1);
    let mut acc = T::zero();
    let mut next = 0;
    for k in 0..=n {
        let node = from_usize::<T>(k) / nf;
        while next < jumps.len() && jumps.times[next] <= node {
            acc = acc + jumps.sizes[next];
            next += 1;
        }
        values.push(acc);
    }
    // times are at most 1, so every jump has been consumed
    debug_assert_eq!(next, jumps.len());
    Ok(PathGrid {
        values,
        method: PathMethod::JumpReconstruction,
        master_seed: None,
        stream_id: None,
    })
}

/// Adds the line μt to a grid path.
pub fn add_drift<T: Scalar>(path: &PathGrid<T>, mu: T) -> PathGrid<T> {
    let nf = from_usize::<T>(path.n());
    let n = path.n();
    let mut out = path.clone();
    for (k, v) in out.values.iter_mut().enumerate() {
        // the endpoint gets mu itself, avoiding rounding in k/n
        let shift = if k == n { mu } else { mu * from_usize::<T>(k) / nf };
        *v = *v + shift;
    }
    out
}

/// Z = W∘σ on the grid k/n, with the pieces kept for pathwise checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubordinatedPath<T> {
    /// σ(k/n), k = 0..=n.
    pub clock: Vec<T>,
    /// Times at which W was sampled: the uniform grid of [0, σ₁] merged with
    /// the clock values, strictly increasing.
    pub brownian_times: Vec<T>,
    pub brownian_values: Vec<T>,
    /// Position of σ(k/n) inside `brownian_times`.
    pub query_index: Vec<usize>,
    /// W(σ(k/n)).
    pub composed: Vec<T>,
}

impl<T: Scalar> SubordinatedPath<T> {
    pub fn clock_end(&self) -> T {
        self.clock[self.clock.len() - 1]
    }

    pub fn to_grid(&self) -> PathGrid<T> {
        PathGrid {
            values: self.composed.clone(),
            method: PathMethod::Subordination,
            master_seed: None,
            stream_id: None,
        }
    }
}

/// Refinement factor of the Brownian grid relative to the path grid.
pub const BROWNIAN_REFINEMENT: usize = 4;

/// Law of the (α/2)-stable clock whose composition with standard Brownian
/// motion is symmetric α-stable with parameter κ.
pub fn subordinating_clock<T: Scalar>(alpha: T, kappa: T) -> Result<SubordinatorLaw<T>> {
    if !(alpha > T::zero() && alpha < lit(2.0)) {
        return Err(domain("alpha", to_f64(alpha), "subordination needs 0 < alpha < 2"));
    }
    let half = alpha / lit(2.0);
    SubordinatorLaw::new(half, kappa * lit::<T>(2.0).powf(half))
}

pub fn simulate_subordinated<T: Scalar>(
    alpha: T,
    kappa: T,
    n: usize,
    rng: &mut RngStream,
) -> Result<SubordinatedPath<T>> {
    if n == 0 {
        return Err(domain("n", 0.0, "grid size must be at least 1"));
    }
    let clock_law = subordinating_clock(alpha, kappa)?;
    let step_law = SubordinatorLaw {
        alpha: clock_law.alpha,
        kappa: clock_law.kappa / from_usize(n),
    };
    let mut clock = Vec::with_capacity(n + 1);
    let mut acc = T::zero();
    clock.push(acc);
    for _ in 0..n {
        acc = acc + sample_one_sided(&step_law, rng);
        clock.push(acc);
    }
    let horizon = acc;

    let m = BROWNIAN_REFINEMENT * n;
    let mf = from_usize::<T>(m);
    let cell = horizon / mf;
    let grid_time = |j: usize| if j == m { horizon } else { horizon * from_usize::<T>(j) / mf };
    let sd = cell.sqrt();
    let mut grid_values = Vec::with_capacity(m + 1);
    let mut w = T::zero();
    grid_values.push(w);
    for _ in 0..m {
        w = w + sd * lit(rng.normal());
        grid_values.push(w);
    }

    let mut times = Vec::with_capacity(m + n + 2);
    let mut values = Vec::with_capacity(m + n + 2);
    let mut query_index = Vec::with_capacity(n + 1);
    times.push(T::zero());
    values.push(T::zero());
    // next grid node not yet merged
    let mut next_grid = 1;
    for &s in &clock {
        while next_grid <= m && grid_time(next_grid) <= s {
            let g = grid_time(next_grid);
            if g > times[times.len() - 1] {
                times.push(g);
                values.push(grid_values[next_grid]);
            }
            next_grid += 1;
        }
        let last = times.len() - 1;
        if s == times[last] {
            query_index.push(last);
            continue;
        }
        // bridge from the last sampled point to the next grid node
        let (t0, w0) = (times[last], values[last]);
        let (t1, w1) = (grid_time(next_grid), grid_values[next_grid]);
        let span = t1 - t0;
        let frac = (s - t0) / span;
        let mean = w0 + frac * (w1 - w0);
        let var = (s - t0) * (t1 - s) / span;
        let value = mean + var.max(T::zero()).sqrt() * lit(rng.normal());
        times.push(s);
        values.push(value);
        query_index.push(last + 1);
    }
    while next_grid <= m {
        let g = grid_time(next_grid);
        if g > times[times.len() - 1] {
            times.push(g);
            values.push(grid_values[next_grid]);
        }
        next_grid += 1;
    }
    let composed = query_index.iter().map(|&i| values[i]).collect();
    Ok(SubordinatedPath {
        clock,
        brownian_times: times,
        brownian_values: values,
        query_index,
        composed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::erfc;
    use approx::assert_relative_eq;

    fn cauchy() -> StableLaw<f64> {
        StableLaw::<f64>::from_symmetric(1.0, 1.0).unwrap()
    }

    #[test]
    fn grid_with_one_step() {
        let mut rng = RngStream::new(7, 0);
        let path = simulate_grid(&cauchy(), 1, &mut rng).unwrap();
        assert_eq!(path.values().len(), 2);
        assert_eq!(path.values()[0], 0.0);
        assert_eq!(path.method, PathMethod::GridIncrements);
        assert_eq!(path.master_seed, Some(7));
        assert!(simulate_grid(&cauchy(), 0, &mut rng).is_err());
    }

    #[test]
    fn subordinator_grid_is_monotone() {
        let law = StableLaw::<f64>::from_subordinator(0.5, 1.0).unwrap();
        let mut rng = RngStream::new(11, 0);
        for _ in 0..200 {
            let path = simulate_grid(&law, 256, &mut rng).unwrap();
            assert!(path.values().windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn brownian_endpoint_variance() {
        let law = StableLaw::<f64>::from_symmetric(2.0, 0.5).unwrap();
        let mut rng = RngStream::new(5, 0);
        let mut buf = Vec::new();
        let n_paths = 20_000;
        let mut s2 = 0.0;
        let mut s4 = 0.0;
        for _ in 0..n_paths {
            fill_grid(&law, 64, &mut rng, &mut buf);
            let x2 = buf[64] * buf[64];
            s2 += x2;
            s4 += x2 * x2;
        }
        let mean = s2 / n_paths as f64;
        let se = ((s4 / n_paths as f64 - mean * mean) / n_paths as f64).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * se, "{mean} ± {se}");
    }

    #[test]
    fn jump_count_matches_levy_tail() {
        let law = cauchy();
        let mut rng = RngStream::new(2, 0);
        let draws = 100_000;
        let total: usize = (0..draws).map(|_| simulate_jumps(&law, 1.0, &mut rng).unwrap().len()).sum();
        let mean = total as f64 / draws as f64;
        let expected = 2.0 / std::f64::consts::PI;
        let se = (expected / draws as f64).sqrt();
        assert!((mean - expected).abs() < 3.0 * se, "{mean}");
    }

    #[test]
    fn jump_set_invariants() {
        let law = StableLaw::<f64>::from_levy_measure(0.7, 0.3, 1.1).unwrap();
        let mut rng = RngStream::new(4, 0);
        for _ in 0..100 {
            let jumps = simulate_jumps(&law, 0.01, &mut rng).unwrap();
            assert!(jumps.times().windows(2).all(|w| w[0] < w[1]));
            assert!(jumps.sizes().iter().all(|z: &f64| z.abs() > 0.01));
            assert!(jumps.times().iter().all(|&t| t > 0.0 && t <= 1.0));
            JumpSet::new(jumps.times().to_vec(), jumps.sizes().to_vec(), 0.01).unwrap();
        }
    }

    #[test]
    fn subordinator_jumps_are_positive() {
        let law = StableLaw::<f64>::from_subordinator(0.5, 1.0).unwrap();
        let mut rng = RngStream::new(9, 0);
        for _ in 0..200 {
            let jumps = simulate_jumps(&law, 1e-3, &mut rng).unwrap();
            assert!(jumps.sizes().iter().all(|&z| z > 0.0));
        }
    }

    #[test]
    fn jumps_reject_gaussian() {
        let law = StableLaw::<f64>::from_symmetric(2.0, 0.5).unwrap();
        let mut rng = RngStream::new(1, 0);
        assert!(simulate_jumps(&law, 0.1, &mut rng).is_err());
    }

    #[test]
    fn power_sum_examples() {
        assert_eq!(sp_from_jumps(&JumpSet::<f64>::empty(0.1), 2.0), 0.0);
        let one = JumpSet::new(vec![0.5], vec![-2.0], 0.1).unwrap();
        assert_eq!(sp_from_jumps(&one, 3.0), 8.0);
    }

    #[test]
    fn restriction_is_monotone() {
        let law = cauchy();
        let mut rng = RngStream::new(3, 0);
        let jumps = simulate_jumps(&law, 1e-3, &mut rng).unwrap();
        let mut previous = f64::INFINITY;
        for eta in [1e-3, 1e-2, 1e-1, 1.0] {
            let s = sp_from_jumps(&jumps.restrict(eta), 1.5);
            assert!(s <= previous);
            previous = s;
        }
    }

    #[test]
    fn step_path_examples() {
        let empty = step_path_from_jumps(&JumpSet::<f64>::empty(0.1), 5).unwrap();
        assert!(empty.values().iter().all(|&v| v == 0.0));

        let one = JumpSet::new(vec![0.3], vec![1.0], 0.1).unwrap();
        let path = step_path_from_jumps(&one, 10).unwrap();
        let expected: Vec<f64> = (0..=10).map(|k| if k >= 3 { 1.0 } else { 0.0 }).collect();
        assert_eq!(path.values(), &expected[..]);

        let two = JumpSet::new(vec![0.2, 0.7], vec![1.0, -2.0], 0.1).unwrap();
        assert_eq!(step_path_from_jumps(&two, 10).unwrap().endpoint(), -1.0);
    }

    #[test]
    fn drift_examples() {
        let zero = PathGrid::from_values(vec![0.0; 5], PathMethod::GridIncrements).unwrap();
        let line = add_drift(&zero, 1.0);
        assert_eq!(line.values(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(add_drift(&zero, 0.0), zero);
        let path = PathGrid::from_values(vec![0.0, 0.3, -0.2], PathMethod::GridIncrements).unwrap();
        assert_eq!(add_drift(&path, 0.7).endpoint(), -0.2 + 0.7);
    }

    #[test]
    fn subordinated_structure() {
        let mut rng = RngStream::new(21, 0);
        for _ in 0..50 {
            let path = simulate_subordinated(1.0, 1.0, 64, &mut rng).unwrap();
            assert!(path.clock.windows(2).all(|w| w[1] >= w[0]));
            assert_eq!(path.clock[0], 0.0);
            assert!(path.brownian_times.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(*path.brownian_times.last().unwrap(), path.clock_end());
            for (k, &i) in path.query_index.iter().enumerate() {
                assert_eq!(path.brownian_times[i], path.clock[k]);
                assert_eq!(path.composed[k], path.brownian_values[i]);
            }
            assert_eq!(path.composed[0], 0.0);
        }
    }

    #[test]
    fn clock_laplace_transform() {
        // E exp(-σ₁) = exp(-√2) for alpha = 1, kappa = 1
        let clock = subordinating_clock(1.0, 1.0).unwrap();
        assert_relative_eq!(clock.kappa, 2f64.sqrt(), max_relative = 1e-15);
        let mut rng = RngStream::new(8, 0);
        let n = 200_000;
        let draws: Vec<f64> = (0..n).map(|_| (-clock.sample(&mut rng)).exp()).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - 0.243_116_734_434_214_21).abs() < 3.0 * se, "{mean} ± {se}");
    }

    #[test]
    fn one_sided_levy_cdf() {
        let law = SubordinatorLaw::<f64>::new(0.5, 1.0).unwrap();
        let mut rng = RngStream::new(13, 0);
        let n = 200_000;
        let hits = (0..n).filter(|_| law.sample(&mut rng) <= 0.5).count();
        let expected = erfc(1.0 / (2.0 * 0.5f64.sqrt()));
        let phat = hits as f64 / n as f64;
        let se = (expected * (1.0 - expected) / n as f64).sqrt();
        assert!((phat - expected).abs() < 3.0 * se, "{phat} vs {expected}");
    }
}
