use gadget_core::Executor;
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

/// Runs node work on a dedicated rayon pool. Results come back in node order,
/// so outputs never depend on the pool size.
#[derive(Debug)]
pub struct PoolExecutor {
    pool: ThreadPool,
}

impl PoolExecutor {
    pub fn new(workers: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        Ok(PoolExecutor { pool: ThreadPoolBuilder::new().num_threads(workers.max(1)).build()? })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for PoolExecutor {
    fn for_each_node<S, T, F>(&self, nodes: &mut [S], f: F) -> Vec<T>
    where
        S: Send,
        T: Send,
        F: Fn(usize, &mut S) -> T + Sync,
    {
        self.pool.install(|| nodes.par_iter_mut().enumerate().map(|(i, s)| f(i, s)).collect())
    }
}
