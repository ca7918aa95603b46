//! Index-ordered parallel maps with a sequential fallback.
//!
//! Callers pass a minimum number of items per task; small inputs run inline.
//! Output order always matches input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) fn map_range<T, F>(n: usize, min_len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if n > min_len {
            return (0..n).into_par_iter().with_min_len(min_len.max(1)).map(f).collect();
        }
    }
    let _ = min_len;
    (0..n).map(f).collect()
}

/// Splits `0..n` into fixed chunks of `chunk` items and maps each chunk's
/// range. Chunk boundaries do not depend on the thread count.
pub(crate) fn map_chunks<T, F>(n: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, std::ops::Range<usize>) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let count = n.div_ceil(chunk);
    map_range(count, 1, |c| {
        let start = c * chunk;
        f(c, start..(start + chunk).min(n))
    })
}
