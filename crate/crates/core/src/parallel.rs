//! Data-parallel execution helpers.
//!
//! With the `parallel` feature (default) the closures run on the rayon pool;
//! without it the same code runs sequentially. Every helper assigns each
//! output slot to exactly one index, so results are identical in both modes
//! and independent of thread count. The `*_seq` variants always run
//! sequentially and exist so benchmarks can compare the two paths directly.

/// Fills `out[i] = f(i)` for every index.
pub fn fill_indexed<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        out.par_iter_mut().enumerate().for_each(|(i, slot)| *slot = f(i));
    }
    #[cfg(not(feature = "parallel"))]
    fill_indexed_seq(out, f);
}

/// Sequential reference path for [`fill_indexed`].
pub fn fill_indexed_seq<T, F>(out: &mut [T], f: F)
where
    F: Fn(usize) -> T,
{
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = f(i);
    }
}

/// Maps `f` over `0..n`, collecting results in index order.
pub fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    map_collect_seq(n, f)
}

/// Sequential reference path for [`map_collect`].
pub fn map_collect_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Runs `f` on disjoint chunks of `out`, passing the chunk's start index.
/// Chunk boundaries are fixed by `chunk_len`, not by thread count.
pub fn for_each_chunk<T, F>(out: &mut [T], chunk_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    assert!(chunk_len > 0);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        out.par_chunks_mut(chunk_len)
            .enumerate()
            .for_each(|(c, chunk)| f(c * chunk_len, chunk));
    }
    #[cfg(not(feature = "parallel"))]
    for_each_chunk_seq(out, chunk_len, f);
}

/// Sequential reference path for [`for_each_chunk`].
pub fn for_each_chunk_seq<T, F>(out: &mut [T], chunk_len: usize, f: F)
where
    F: Fn(usize, &mut [T]),
{
    assert!(chunk_len > 0);
    for (c, chunk) in out.chunks_mut(chunk_len).enumerate() {
        f(c * chunk_len, chunk);
    }
}
