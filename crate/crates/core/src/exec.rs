//! Chunked execution backend.
//!
//! All Monte Carlo loops are expressed as a map over a fixed number of
//! chunks whose results are concatenated in chunk order. The sequential and
//! parallel backends therefore produce bit-identical output.

/// Number of draws handled by one chunk (and one random stream).
pub const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Sequential,
    /// Rayon work-stealing pool. Falls back to sequential execution when the
    /// crate is built without the `parallel` feature.
    Parallel,
}

impl Default for Backend {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Backend::Parallel
        } else {
            Backend::Sequential
        }
    }
}

/// Splits `len` items into chunks of [`CHUNK`] and returns `(chunk index, range)`.
pub fn chunk_ranges(len: usize) -> Vec<(u64, std::ops::Range<usize>)> {
    (0..len.div_ceil(CHUNK))
        .map(|c| {
            let start = c * CHUNK;
            (c as u64, start..(start + CHUNK).min(len))
        })
        .collect()
}

/// Runs `f` on every chunk of `0..len` and concatenates the outputs in order.
pub fn map_chunks<T, F>(len: usize, backend: Backend, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, std::ops::Range<usize>) -> Vec<T> + Sync + Send,
{
    let ranges = chunk_ranges(len);
    let parts: Vec<Vec<T>> = match backend {
        #[cfg(feature = "parallel")]
        Backend::Parallel => {
            use rayon::prelude::*;
            ranges.into_par_iter().map(|(c, r)| f(c, r)).collect()
        }
        _ => ranges.into_iter().map(|(c, r)| f(c, r)).collect(),
    };
    let mut out = Vec::with_capacity(len);
    for p in parts {
        out.extend(p);
    }
    out
}

/// Element-wise map of a slice, chunked like [`map_chunks`].
pub fn map_slice<T, U, F>(items: &[T], backend: Backend, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    map_chunks(items.len(), backend, |_, r| items[r].iter().map(&f).collect())
}
