//! Data-parallel helpers with a sequential fallback.
//!
//! Everything here is a thin wrapper so the rest of the crate is written
//! once. With the `parallel` feature (default) the work fans out over
//! rayon; without it the same helpers run on plain iterators. All helpers
//! are order-deterministic: the parallel and sequential builds return
//! identical values.

/// Finds `f(i) = Some(..)` for the smallest `i` in `0..count`.
pub fn find_first_map<T: Send>(
    count: u64,
    f: impl Fn(u64) -> Option<T> + Sync + Send,
) -> Option<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().find_map_first(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).find_map(f)
    }
}

/// Sequential twin of [`find_first_map`], always available (used by the
/// benches for comparison).
pub fn find_first_map_seq<T>(count: u64, f: impl Fn(u64) -> Option<T>) -> Option<T> {
    (0..count).find_map(f)
}

/// Maps `0..count` and collects in index order.
pub fn map_collect<T: Send>(count: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

/// Sequential twin of [`map_collect`].
pub fn map_collect_seq<T>(count: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..count).map(f).collect()
}

/// Maximum of `f` over `0..count`; 0 when the range is empty.
pub fn max_map(count: u64, f: impl Fn(u64) -> u32 + Sync + Send) -> u32 {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).max().unwrap_or(0)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).max().unwrap_or(0)
    }
}

/// Sequential twin of [`max_map`].
pub fn max_map_seq(count: u64, f: impl Fn(u64) -> u32) -> u32 {
    (0..count).map(f).max().unwrap_or(0)
}

/// Fills `dst` by rows: `f(row_index, row_slice)` on consecutive
/// `row_len`-sized chunks.
pub fn fill_rows(dst: &mut [u32], row_len: usize, f: impl Fn(usize, &mut [u32]) + Sync + Send) {
    debug_assert!(row_len > 0 && dst.len() % row_len == 0);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        dst.par_chunks_mut(row_len).enumerate().for_each(|(i, row)| f(i, row));
    }
    #[cfg(not(feature = "parallel"))]
    {
        dst.chunks_mut(row_len).enumerate().for_each(|(i, row)| f(i, row));
    }
}

/// Sequential twin of [`fill_rows`].
pub fn fill_rows_seq(dst: &mut [u32], row_len: usize, f: impl Fn(usize, &mut [u32])) {
    debug_assert!(row_len > 0 && dst.len() % row_len == 0);
    dst.chunks_mut(row_len).enumerate().for_each(|(i, row)| f(i, row));
}
