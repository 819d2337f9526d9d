//! Data-parallel execution helper with a sequential fallback.
//!
//! The hot loops in this workspace (batch Hilbert scoring, Monte-Carlo
//! trial batches) are embarrassingly parallel maps over an index range.
//! [`map_indexed`] runs them on the rayon thread pool when the `parallel`
//! feature is enabled and sequentially otherwise; results always come back
//! in index order, so output is identical regardless of thread count.
//! [`map_indexed_seq`] is the always-sequential reference path used by the
//! benchmark suite to measure the speedup.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, collecting results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Maps `f` over `0..n`, collecting results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Sequential reference implementation of [`map_indexed`].
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_matches_sequential() {
        let f = |i: usize| (i as f64).sqrt() * 3.0 - 1.0;
        assert_eq!(map_indexed(1000, f), map_indexed_seq(1000, f));
    }

    #[test]
    fn preserves_index_order() {
        let out = map_indexed(512, |i| i);
        assert!(out.iter().enumerate().all(|(i, &v)| i == v));
    }
}
