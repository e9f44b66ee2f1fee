//! Thread-pool sweep.

use lke_core::Sweep;
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

/// Environment variable consulted when no thread count is given explicitly.
pub const THREADS_ENV: &str = "LKE_THREADS";

/// Evaluates sweep points on a dedicated rayon pool.
///
/// Results are gathered by index, so output is identical for any thread
/// count.
pub struct Pool {
    pool: ThreadPool,
}

impl Pool {
    /// `threads = 0` lets rayon pick one thread per core.
    pub fn new(threads: usize) -> Result<Pool, rayon::ThreadPoolBuildError> {
        let pool = ThreadPoolBuilder::new().num_threads(threads).build()?;
        Ok(Pool { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Sweep for Pool {
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..len).into_par_iter().map(f).collect())
    }
}

/// Thread count from an explicit flag, else [`THREADS_ENV`], else 0.
///
/// An unparsable environment value is reported rather than ignored.
pub fn resolve_threads(flag: Option<usize>) -> Result<usize, String> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(THREADS_ENV) {
        Ok(raw) => raw
            .trim()
            .parse()
            .map_err(|_| format!("{THREADS_ENV}={raw:?} is not a thread count")),
        Err(_) => Ok(0),
    }
}
