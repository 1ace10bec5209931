//! Data-parallel helpers. With the `parallel` feature these run on the rayon
//! pool, otherwise they fall back to plain iterators. Results always come back
//! in input order so reductions downstream stay bit-stable.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many scalar multiply-adds a matrix product stays sequential.
pub(crate) const MATMUL_PAR_THRESHOLD: usize = 1 << 15;

pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Runs `f(row_index, row)` over the rows of a row-major buffer.
pub(crate) fn rows_mut<T, F>(data: &mut [T], cols: usize, parallel: bool, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    if cols == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    if parallel {
        data.par_chunks_mut(cols)
            .enumerate()
            .for_each(|(i, row)| f(i, row));
        return;
    }
    let _ = parallel;
    data.chunks_mut(cols)
        .enumerate()
        .for_each(|(i, row)| f(i, row));
}

/// True when the crate was built with the rayon backend.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
