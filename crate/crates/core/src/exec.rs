//! Execution strategy for the data-parallel inner loops.
//!
//! With the `parallel` feature (default) [`Exec::Parallel`] fans work out over
//! rayon's global pool. Without it every strategy runs sequentially. Results
//! never depend on the strategy: every reduction used here is associative and
//! the merges are order-preserving.

use std::ops::Range;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Folds `range` into chunks with `fold` and combines the chunk results
    /// with `reduce`. `reduce` must be associative; chunks are combined in
    /// index order.
    pub fn fold_range<T, F, R>(self, range: Range<u64>, identity: impl Fn() -> T + Sync + Send, fold: F, reduce: R) -> T
    where
        T: Send,
        F: Fn(T, u64) -> T + Sync + Send,
        R: Fn(T, T) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            let len = range.end.saturating_sub(range.start);
            let chunk = (len / (rayon::current_num_threads() as u64 * 8)).max(1024);
            let chunks = len.div_ceil(chunk);
            return (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let lo = range.start + c * chunk;
                    let hi = (lo + chunk).min(range.end);
                    (lo..hi).fold(identity(), &fold)
                })
                .reduce(&identity, &reduce);
        }
        #[cfg(not(feature = "parallel"))]
        let _ = reduce;
        range.fold(identity(), fold)
    }

    /// Order-preserving map over a slice.
    pub fn map<I, O, F>(self, items: &[I], f: F) -> Vec<O>
    where
        I: Sync,
        O: Send,
        F: Fn(&I) -> O + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Order-preserving map over an index range.
    pub fn map_range<O, F>(self, range: Range<u64>, f: F) -> Vec<O>
    where
        O: Send,
        F: Fn(u64) -> O + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return range.into_par_iter().map(f).collect();
        }
        range.map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            let s = exec.fold_range(0..100_000, || 0u64, |a, i| a + i, |a, b| a + b);
            assert_eq!(s, 100_000 * 99_999 / 2);
            let v = exec.map_range(0..10, |i| i * i);
            assert_eq!(v, (0..10).map(|i| i * i).collect::<Vec<_>>());
        }
    }
}
