//! Thin data-parallel layer.
//!
//! Work is always split into fixed-size chunks whose results are returned in
//! chunk order, so reductions performed by callers are bit-identical whether
//! the `parallel` feature is enabled or not, and independent of the number of
//! worker threads.

use std::ops::Range;

/// Number of items handled by one chunk of work.
pub const CHUNK: usize = 2048;

/// Maps `f` over consecutive chunks of `0..len` and returns the chunk results
/// in order.
pub fn map_chunks<T, F>(len: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let n_chunks = len.div_ceil(chunk);
    let range_of = |c: usize| c * chunk..((c + 1) * chunk).min(len);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n_chunks).into_par_iter().map(|c| f(range_of(c))).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n_chunks).map(|c| f(range_of(c))).collect()
    }
}

/// Maps `f` over `0..len`, preserving order.
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Maps `f` over a slice, preserving order.
pub fn map_slice<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    map_indexed(items.len(), |i| f(&items[i]))
}

/// Whether this build evaluates chunks on a thread pool.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
