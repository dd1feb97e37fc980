//! Deterministic replicate-parallel execution.
//!
//! Replicates are cut into fixed-size chunks independent of the worker count;
//! each chunk is folded sequentially and the per-chunk partials are returned
//! in chunk order. Combined left to right, they give bitwise-identical results
//! for any number of threads.

use std::ops::Range;

use rayon::prelude::*;

/// Replicates per chunk.
pub const CHUNK: usize = 1024;

/// Runs `work` on each chunk of `0..n` using `threads` workers (0 = all cores).
pub fn map_chunks<P, F>(n: usize, threads: usize, work: F) -> Vec<P>
where
    P: Send,
    F: Fn(Range<usize>) -> P + Sync + Send,
{
    let chunks: Vec<Range<usize>> = (0..n.div_ceil(CHUNK))
        .map(|c| c * CHUNK..((c + 1) * CHUNK).min(n))
        .collect();
    if threads == 1 || chunks.len() <= 1 {
        return chunks.into_iter().map(&work).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool construction");
    pool.install(|| chunks.into_par_iter().map(&work).collect())
}

/// Evaluates `f` at every replicate index, in index order.
pub fn map_replicates<V, F>(n: usize, threads: usize, f: F) -> Vec<V>
where
    V: Send,
    F: Fn(usize) -> V + Sync + Send,
{
    map_chunks(n, threads, |range| range.map(&f).collect::<Vec<V>>())
        .into_iter()
        .flatten()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let n = 3 * CHUNK + 17;
        let one = map_replicates(n, 1, |i| (i as f64).sqrt());
        let many = map_replicates(n, 4, |i| (i as f64).sqrt());
        assert_eq!(one, many);
        assert_eq!(one.len(), n);
        assert_eq!(map_chunks(0, 4, |r| r.len()).len(), 0);
    }
}
