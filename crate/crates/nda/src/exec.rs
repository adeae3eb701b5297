//! Thread-pool executor for independent chains.

use nda_core::exec::ChainExecutor;
use rayon::prelude::*;

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "NDA_THREADS";

/// Runs chains on a rayon pool. Output order follows chain index, so the
/// worker count never changes results.
pub struct Parallel {
    pool: rayon::ThreadPool,
}

impl Parallel {
    pub fn new(threads: usize) -> Self {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
        Parallel { pool }
    }

    /// Worker count from `NDA_THREADS`, else rayon's default.
    pub fn from_env() -> Self {
        let n = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(0);
        Self::new(n)
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl ChainExecutor for Parallel {
    fn map_chains<T, F>(&self, n_chains: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        let f = &f;
        self.pool.install(|| (0..n_chains).into_par_iter().map(f).collect())
    }
}
