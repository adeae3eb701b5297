//! How independent chains are scheduled.
//!
//! Every chain owns its RNG stream, so an executor only decides where the
//! work runs; results come back in chain order either way.

use alloc::vec::Vec;

pub trait ChainExecutor: Sync {
    fn map_chains<T, F>(&self, n_chains: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync;
}

/// Runs chains one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl ChainExecutor for Sequential {
    fn map_chains<T, F>(&self, n_chains: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        (0..n_chains).map(f).collect()
    }
}
