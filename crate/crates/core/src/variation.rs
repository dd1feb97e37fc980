//! Semi-norms of discrete paths: strong p-variation, its mesh-restricted and
//! blockwise versions, sup, oscillation, Hölder and L2.
//!
//! For p ≥ 1 an optimal partition can be chosen among the turning points of
//! the sequence (endpoints plus strict local extrema), because |·|^p is convex
//! and superadditive on monotone runs. The dynamic program
//! `F[j] = max_{k<j} F[k] + |y_j − y_k|^p` is then accelerated with a dyadic
//! min/max pyramid: a block of candidates k is skipped when
//! `F[last of block] + (max distance from y_j to the block range)^p`
//! cannot beat the current best. F is nondecreasing, so this bound is valid
//! and the result stays exact.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::path::JumpSet;
use crate::scalar::{from_usize, lit, to_f64, Scalar};
use crate::sum::CompensatedSum;

/// Longest input accepted by [`pvar_bruteforce`].
pub const BRUTEFORCE_MAX_LEN: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationResult<T> {
    /// Σ |x[i_j] − x[i_{j−1}]|^p over `optimal_indices`.
    pub value: T,
    pub optimal_indices: Vec<usize>,
    pub p: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockDecomposition<T> {
    pub n_blocks: usize,
    /// p-variation of each block, boundaries included in both neighbours.
    pub block_values: Vec<T>,
    /// Grid indices of the block boundaries, `n_blocks + 1` of them.
    pub boundaries: Vec<usize>,
}

impl<T: Scalar> BlockDecomposition<T> {
    pub fn total(&self) -> T {
        self.block_values.iter().copied().collect::<CompensatedSum<T>>().value()
    }

    pub fn max_block(&self) -> T {
        self.block_values.iter().copied().fold(T::zero(), T::max)
    }
}

/// Both sides of a deterministic inequality evaluated on one path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityWitness<T> {
    pub premise: bool,
    pub lhs: T,
    pub rhs: T,
    pub holds: bool,
}

impl<T: Scalar> InequalityWitness<T> {
    fn new(premise: bool, lhs: T, rhs: T) -> Self {
        let holds = !premise || lhs <= rhs * (T::one() + T::rounding_slack());
        Self { premise, lhs, rhs, holds }
    }
}

#[inline]
fn pow_abs<T: Scalar>(d: T, p: T) -> T {
    let d = d.abs();
    if p == T::one() {
        d
    } else if p == lit(2.0) {
        d * d
    } else {
        d.powf(p)
    }
}

fn check_p<T: Scalar>(p: T) -> Result<()> {
    if p >= T::one() && p.is_finite() {
        Ok(())
    } else if p < T::one() && p > T::zero() {
        Err(Error::PureJumpRegime { p: to_f64(p) })
    } else {
        Err(domain("p", to_f64(p), "p-variation needs finite p >= 1"))
    }
}

/// Indices of the turning points: the first index, the last index of each
/// monotone run, with plateaus collapsed onto their first index.
pub fn turning_points<T: Scalar>(values: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = Vec::new();
    for (i, &x) in values.iter().enumerate() {
        let Some(&last) = idx.last() else {
            idx.push(i);
            continue;
        };
        let y = values[last];
        if x == y {
            continue;
        }
        if idx.len() >= 2 {
            let prev = values[idx[idx.len() - 2]];
            if (y > prev) == (x > y) {
                *idx.last_mut().unwrap() = i;
                continue;
            }
        }
        idx.push(i);
    }
    idx
}

/// Dyadic min/max pyramid over a sequence.
struct RangePyramid<T> {
    levels: Vec<Vec<(T, T)>>,
}

impl<T: Scalar> RangePyramid<T> {
    fn new(y: &[T]) -> Self {
        let mut levels = vec![y.iter().map(|&v| (v, v)).collect::<Vec<_>>()];
        loop {
            let below = levels.last().unwrap();
            if below.len() < 2 {
                break;
            }
            let next = below
                .chunks_exact(2)
                .map(|c| (c[0].0.min(c[1].0), c[0].1.max(c[1].1)))
                .collect();
            levels.push(next);
        }
        Self { levels }
    }

    /// (min, max) of the aligned block `[index·2^level, (index+1)·2^level)`.
    #[inline]
    fn range(&self, level: usize, index: usize) -> (T, T) {
        self.levels[level][index]
    }

    fn top(&self) -> usize {
        self.levels.len() - 1
    }
}

/// F[j] = best Σ|Δ|^p over partitions ending at j (starting anywhere ≤ j).
fn prefix_dp<T: Scalar>(y: &[T], p: T) -> Vec<T> {
    let m = y.len();
    let mut f = vec![T::zero(); m];
    if m < 2 {
        return f;
    }
    let pyramid = RangePyramid::new(y);
    let top = pyramid.top();
    for j in 1..m {
        let yj = y[j];
        let mut best = f[j - 1] + pow_abs(yj - y[j - 1], p);
        // candidates k in [0, end)
        let mut end = j - 1;
        let mut level = 0usize;
        while end > 0 {
            while level > 0 && (level > top || end & ((1 << level) - 1) != 0 || (1 << level) > end) {
                level -= 1;
            }
            let start = end - (1 << level);
            let (lo, hi) = pyramid.range(level, start >> level);
            let reach = (hi - yj).max(yj - lo);
            if f[end - 1] + pow_abs(reach, p) <= best {
                end = start;
                level += 1;
            } else if level == 0 {
                best = best.max(f[start] + pow_abs(yj - y[start], p));
                end = start;
                level += 1;
            } else {
                level -= 1;
            }
        }
        f[j] = best;
    }
    f
}

/// Exact strong p-variation (the p-th power), without the partition.
pub fn pvar_value<T: Scalar>(values: &[T], p: T) -> Result<T> {
    check_p(p)?;
    if values.is_empty() {
        return Err(Error::Empty);
    }
    let tp = turning_points(values);
    let y: Vec<T> = tp.iter().map(|&i| values[i]).collect();
    Ok(*prefix_dp(&y, p).last().unwrap())
}

fn evaluate<T: Scalar>(values: &[T], indices: &[usize], p: T) -> T {
    indices
        .windows(2)
        .map(|w| pow_abs(values[w[1]] - values[w[0]], p))
        .collect::<CompensatedSum<T>>()
        .value()
}

/// Exact strong p-variation with an optimal partition.
///
/// Among optimal partitions supported on turning points, the lexicographically
/// smallest index set is returned.
pub fn pvar_dp<T: Scalar>(values: &[T], p: T) -> Result<VariationResult<T>> {
    check_p(p)?;
    if values.is_empty() {
        return Err(Error::Empty);
    }
    let tp = turning_points(values);
    let m = tp.len();
    let reversed: Vec<T> = tp.iter().rev().map(|&i| values[i]).collect();
    let mut suffix = prefix_dp(&reversed, p);
    suffix.reverse();
    let y: Vec<T> = tp.iter().map(|&i| values[i]).collect();

    // suffix[i] = best partition starting at i; walk forward taking the
    // smallest index that still attains it
    let mut chosen = vec![0usize];
    let mut i = 0;
    while suffix[i] > T::zero() {
        let target = suffix[i];
        let next = (i + 1..m)
            .find(|&j| pow_abs(y[j] - y[i], p) + suffix[j] >= target)
            .expect("an attaining successor exists");
        chosen.push(next);
        i = next;
    }
    let optimal_indices: Vec<usize> = chosen.into_iter().map(|k| tp[k]).collect();
    Ok(VariationResult {
        value: evaluate(values, &optimal_indices, p),
        optimal_indices,
        p,
    })
}

/// Exhaustive maximum over all subsequences (inputs of length ≤ 20).
///
/// Ties go to the lexicographically smallest index set.
pub fn pvar_bruteforce<T: Scalar>(values: &[T], p: T) -> Result<VariationResult<T>> {
    if !(p > T::zero() && p.is_finite()) {
        return Err(domain("p", to_f64(p), "p must be positive and finite"));
    }
    let len = values.len();
    if len == 0 {
        return Err(Error::Empty);
    }
    if len > BRUTEFORCE_MAX_LEN {
        return Err(Error::TooLong {
            len,
            max: BRUTEFORCE_MAX_LEN,
        });
    }
    let mut best = T::neg_infinity();
    let mut best_set: Vec<usize> = Vec::new();
    let mut set = Vec::with_capacity(len);
    for mask in 1u32..(1u32 << len) {
        set.clear();
        set.extend((0..len).filter(|&i| mask & (1 << i) != 0));
        let mut total = T::zero();
        for w in set.windows(2) {
            total = total + pow_abs(values[w[1]] - values[w[0]], p);
        }
        if total > best || (total == best && set < best_set) {
            best = total;
            best_set.clone_from(&set);
        }
    }
    Ok(VariationResult {
        value: best,
        optimal_indices: best_set,
        p,
    })
}

/// p-variation over partitions whose consecutive index gaps are at most `max_gap`.
pub fn pvar_mesh<T: Scalar>(values: &[T], p: T, max_gap: usize) -> Result<T> {
    check_p(p)?;
    if max_gap == 0 {
        return Err(domain("max_gap", 0.0, "mesh must allow at least one grid step"));
    }
    if values.is_empty() {
        return Err(Error::Empty);
    }
    let mut f = vec![T::zero(); values.len()];
    for j in 1..values.len() {
        let from = j.saturating_sub(max_gap);
        f[j] = (from..j)
            .map(|k| f[k] + pow_abs(values[j] - values[k], p))
            .fold(T::zero(), T::max);
    }
    Ok(*f.last().unwrap())
}

/// p-variation of each of `n_blocks` equal consecutive blocks.
pub fn block_pvars<T: Scalar>(values: &[T], p: T, n_blocks: usize) -> Result<BlockDecomposition<T>> {
    check_p(p)?;
    if values.len() < 2 {
        return Err(Error::Empty);
    }
    let steps = values.len() - 1;
    if n_blocks == 0 || steps % n_blocks != 0 {
        return Err(Error::NotDivisible {
            steps,
            blocks: n_blocks,
        });
    }
    let width = steps / n_blocks;
    let boundaries: Vec<usize> = (0..=n_blocks).map(|k| k * width).collect();
    let block_values = boundaries
        .windows(2)
        .map(|w| pvar_value(&values[w[0]..=w[1]], p))
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockDecomposition {
        n_blocks,
        block_values,
        boundaries,
    })
}

/// Σ |jump|^p: the p-variation (p-th power) of the pure-jump path.
pub fn jump_p_sum<T: Scalar>(jumps: &JumpSet<T>, p: T) -> T {
    jumps.power_sum(p)
}

pub fn sup_norm<T: Scalar>(values: &[T]) -> T {
    values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

/// max − min.
pub fn oscillation<T: Scalar>(values: &[T]) -> T {
    let Some(&first) = values.first() else {
        return T::zero();
    };
    let (lo, hi) = values.iter().fold((first, first), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    hi - lo
}

/// Discrete (1/p)-Hölder seminorm on the uniform grid k/n.
pub fn holder_seminorm<T: Scalar>(values: &[T], p: T, n: usize) -> Result<T> {
    check_p(p)?;
    if n == 0 {
        return Err(domain("n", 0.0, "grid size must be positive"));
    }
    let nf = from_usize::<T>(n);
    Ok(holder_core(values, p, |i, j| from_usize::<T>(j - i) / nf))
}

/// (1/p)-Hölder seminorm of values sampled at increasing times.
///
/// Equal times with different values give +∞.
pub fn holder_on_times<T: Scalar>(times: &[T], values: &[T], p: T) -> Result<T> {
    check_p(p)?;
    if times.len() != values.len() {
        return Err(Error::Config(format!(
            "{} times but {} values",
            times.len(),
            values.len()
        )));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("times must be nondecreasing".into()));
    }
    Ok(holder_core(values, p, |i, j| times[j] - times[i]))
}

fn holder_core<T: Scalar, G: Fn(usize, usize) -> T>(values: &[T], p: T, gap: G) -> T {
    let m = values.len();
    if m < 2 {
        return T::zero();
    }
    let inv_p = p.recip();
    let ratio = |d: T, g: T| {
        if d == T::zero() {
            T::zero()
        } else if g <= T::zero() {
            T::infinity()
        } else {
            d / g.powf(inv_p)
        }
    };
    let mut best = T::zero();
    for i in 0..m - 1 {
        best = best.max(ratio((values[i + 1] - values[i]).abs(), gap(i, i + 1)));
    }
    let (lo_i, hi_i) = (0..m).fold((0, 0), |(lo, hi), k| {
        (
            if values[k] < values[lo] { k } else { lo },
            if values[k] > values[hi] { k } else { hi },
        )
    });
    best = best.max(ratio(values[hi_i] - values[lo_i], gap(lo_i.min(hi_i), lo_i.max(hi_i))));
    if best.is_infinite() {
        return best;
    }

    let pyramid = RangePyramid::new(values);
    let top = pyramid.top();
    for i in 0..m - 1 {
        let xi = values[i];
        // candidates j in [start, m)
        let mut start = i + 2;
        let mut level = 0usize;
        while start < m {
            while level > 0
                && (level > top || start & ((1 << level) - 1) != 0 || start + (1 << level) > m)
            {
                level -= 1;
            }
            let (lo, hi) = pyramid.range(level, start >> level);
            let reach = (hi - xi).max(xi - lo);
            let bound = ratio(reach, gap(i, start));
            if bound <= best {
                start += 1 << level;
                level += 1;
            } else if level == 0 {
                best = best.max(ratio((values[start] - xi).abs(), gap(i, start)));
                if best.is_infinite() {
                    return best;
                }
                start += 1;
                level += 1;
            } else {
                level -= 1;
            }
        }
    }
    best
}

/// Left-endpoint Riemann approximation of (∫₀¹ x_t² dt)^{1/2}.
pub fn l2_norm<T: Scalar>(values: &[T]) -> T {
    match values.len() {
        0 => T::zero(),
        1 => values[0].abs(),
        len => {
            let n = len - 1;
            let sum: T = values[..n].iter().map(|&v| v * v).collect::<CompensatedSum<T>>().value();
            (sum / from_usize(n)).sqrt()
        }
    }
}

/// V ≤ Σ_k V^{k,n} + n·osc^p.
pub fn lemma1_check<T: Scalar>(values: &[T], p: T, n_blocks: usize) -> Result<InequalityWitness<T>> {
    let blocks = block_pvars(values, p, n_blocks)?;
    let lhs = pvar_value(values, p)?;
    let rhs = blocks.total() + from_usize::<T>(n_blocks) * oscillation(values).powf(p);
    Ok(InequalityWitness::new(true, lhs, rhs))
}

/// If every block has V^{k,n} ≤ ε and (Z_{s_k} − Z_{s_{k−1}})·Z_{s_k} ≤ 0,
/// then V ≤ 5^p·n·ε.
pub fn lemma2_check<T: Scalar>(
    values: &[T],
    p: T,
    n_blocks: usize,
    epsilon: T,
) -> Result<InequalityWitness<T>> {
    if !(epsilon > T::zero()) {
        return Err(domain("epsilon", to_f64(epsilon), "must be positive"));
    }
    let blocks = block_pvars(values, p, n_blocks)?;
    let premise = blocks.block_values.iter().all(|&v| v <= epsilon)
        && blocks.boundaries.windows(2).all(|w| {
            let (a, b) = (values[w[0]], values[w[1]]);
            (b - a) * b <= T::zero()
        });
    let lhs = pvar_value(values, p)?;
    let rhs = lit::<T>(5.0).powf(p) * from_usize::<T>(n_blocks) * epsilon;
    Ok(InequalityWitness::new(premise, lhs, rhs))
}
