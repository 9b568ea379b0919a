use fdjam_core::montecarlo::ChunkRunner;
use rayon::prelude::*;

use crate::error::Result;

/// Runs chunks on the current rayon pool. Results come back in chunk order,
/// so estimates do not depend on the thread count.
#[derive(Debug, Clone, Copy, Default)]
pub struct Parallel;

impl ChunkRunner for Parallel {
    fn run<R, F>(&self, n_chunks: usize, job: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        (0..n_chunks).into_par_iter().map(job).collect()
    }
}

/// Runs `f` inside a dedicated pool of `threads` workers, or on the global
/// pool when `threads` is `None`.
pub fn with_threads<T, F>(threads: Option<usize>, f: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            Ok(pool.install(f))
        }
    }
}
