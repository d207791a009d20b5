//! Execution policy for data-parallel loops.
//!
//! With the `parallel` feature (default) work is spread over a rayon pool of
//! the requested size. Without it every loop runs sequentially. Results are
//! always collected in index order, so output never depends on the worker
//! count.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Execution {
    Sequential,
    /// `0` means "use all available cores".
    Parallel {
        workers: usize,
    },
    #[default]
    Auto,
}

impl Execution {
    pub fn with_workers(workers: usize) -> Self {
        if workers == 1 {
            Execution::Sequential
        } else {
            Execution::Parallel { workers }
        }
    }

    /// Map `f` over `0..len` and collect results in index order.
    pub fn map_indexed<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self.pool_size() {
            None => (0..len).map(f).collect(),
            #[cfg(feature = "parallel")]
            Some(workers) => run_parallel(workers, len, f),
            #[cfg(not(feature = "parallel"))]
            Some(_) => (0..len).map(f).collect(),
        }
    }

    /// Like [`Execution::map_indexed`] but short-circuits on the first error
    /// (lowest index wins so the reported error is deterministic).
    pub fn try_map_indexed<T, E, F>(self, len: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        self.map_indexed(len, f).into_iter().collect()
    }

    fn pool_size(self) -> Option<usize> {
        match self {
            Execution::Sequential => None,
            Execution::Parallel { workers } => Some(workers),
            Execution::Auto => Some(0),
        }
    }
}

#[cfg(feature = "parallel")]
fn run_parallel<T, F>(workers: usize, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;

    if workers == 0 {
        return (0..len).into_par_iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| (0..len).into_par_iter().map(&f).collect()),
        // pool creation only fails on resource exhaustion; fall back to the global pool
        Err(_) => (0..len).into_par_iter().map(f).collect(),
    }
}

/// True when the crate was built with rayon support.
pub const fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}
