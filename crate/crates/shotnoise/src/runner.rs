//! Parallel replica execution with deterministic, index-ordered results.

use rayon::prelude::*;
use shotnoise_core::RngStream;

use crate::error::{AppError, Result};

pub struct Runner {
    pool: rayon::ThreadPool,
    seed: u64,
}

impl Runner {
    /// `threads = None` uses the available parallelism.
    pub fn new(seed: u64, threads: Option<usize>) -> Result<Self> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            b = b.num_threads(n);
        }
        Ok(Runner { pool: b.build()?, seed })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Runs `f(r, stream)` for `r in 0..replicas`, where `stream` is
    /// `RngStream::for_replica(seed, family, r)`. Results come back in replica
    /// order; on error the lowest failing replica's error is returned.
    pub fn replicas<T, F>(&self, family: &str, replicas: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize, &mut RngStream) -> Result<T> + Sync,
    {
        let seed = self.seed;
        let results: Vec<Result<T>> = self.pool.install(|| {
            (0..replicas)
                .into_par_iter()
                .map(|r| {
                    let mut rng = RngStream::for_replica(seed, family, r as u64);
                    f(r, &mut rng)
                })
                .collect()
        });
        results.into_iter().collect()
    }

    /// Runs independent jobs on the pool, returning results in input order.
    pub fn map<I, T, F>(&self, items: &[I], f: F) -> Result<Vec<T>>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> Result<T> + Sync,
    {
        let results: Vec<Result<T>> = self.pool.install(|| items.par_iter().map(&f).collect());
        results.into_iter().collect::<std::result::Result<Vec<T>, AppError>>()
    }
}
