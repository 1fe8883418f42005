use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuildError, ThreadPoolBuilder};

use samweb_core::numlab::Executor;

/// Runs jobs on a dedicated rayon pool. Results keep input order, so the
/// thread count never changes the output.
pub struct RayonExecutor {
    pool: ThreadPool,
}

impl RayonExecutor {
    /// `threads = 0` lets rayon pick the number of threads.
    pub fn new(threads: usize) -> Result<Self, ThreadPoolBuildError> {
        Ok(RayonExecutor {
            pool: ThreadPoolBuilder::new().num_threads(threads).build()?,
        })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for RayonExecutor {
    fn map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        self.pool.install(|| items.into_par_iter().map(f).collect())
    }
}
