//! Data-parallel helpers.
//!
//! With the `parallel` feature (on by default) these fan out over rayon;
//! without it they fall back to plain sequential iteration. Callers are
//! responsible for making per-item work independent of scheduling order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..len`, preserving index order in the output.
#[cfg(feature = "parallel")]
pub fn map_indexed<U, F>(len: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..len).into_par_iter().map(f).collect()
}

/// Map `f` over `0..len`, preserving index order in the output.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<U, F>(len: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..len).map(f).collect()
}

/// Sequential twin of [`map_indexed`], kept available for benchmarking the
/// parallel speedup and as a scheduling-independent reference.
pub fn map_indexed_seq<U, F>(len: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..len).map(f).collect()
}
