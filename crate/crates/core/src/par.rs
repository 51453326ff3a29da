//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) [`Execution::Parallel`] runs on the
//! rayon pool; without it every call is sequential. Results are always
//! returned in index order, so output never depends on the execution mode.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// Whether this build can actually run in parallel.
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }

    /// `f(0), f(1), …, f(n-1)` collected in order.
    pub fn map_indexed<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// Indices in `0..n` for which `keep` holds, ascending.
    pub fn filter_indices<F>(self, n: usize, keep: F) -> Vec<usize>
    where
        F: Fn(usize) -> bool + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..n).into_par_iter().filter(|&i| keep(i)).collect(),
            _ => (0..n).filter(|&i| keep(i)).collect(),
        }
    }

    /// Fill `out[i] = f(i)` in chunks of `chunk` elements.
    pub fn fill_chunks<T, F>(self, out: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut T) + Sync + Send,
    {
        let chunk = chunk.max(1);
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel if out.len() > chunk => {
                out.par_chunks_mut(chunk)
                    .enumerate()
                    .for_each(|(c, block)| {
                        let base = c * chunk;
                        for (j, slot) in block.iter_mut().enumerate() {
                            f(base + j, slot);
                        }
                    });
            }
            _ => {
                for (i, slot) in out.iter_mut().enumerate() {
                    f(i, slot);
                }
            }
        }
    }
}
