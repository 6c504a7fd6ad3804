//! Multi-threaded path engine.

use std::sync::Arc;

use herdprice_core::mc::{PathEngine, PathPlan, SimulationRun, SimulationSpec, Tally};
use herdprice_core::Result;
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

/// Runs path chunks on a rayon pool.
///
/// Chunk tallies are merged in chunk order, so the output is bitwise equal to
/// [`herdprice_core::mc::SerialEngine`] whatever the number of threads.
#[derive(Clone)]
pub struct ParallelEngine {
    pool: Arc<ThreadPool>,
}

impl ParallelEngine {
    /// `threads = None` uses one worker per available core.
    pub fn new(threads: Option<usize>) -> std::result::Result<Self, rayon::ThreadPoolBuildError> {
        let mut builder = ThreadPoolBuilder::new().thread_name(|i| format!("herdprice-{i}"));
        if let Some(n) = threads {
            builder = builder.num_threads(n.max(1));
        }
        Ok(Self { pool: Arc::new(builder.build()?) })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Runs `f` inside the engine's pool.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.pool.install(f)
    }
}

impl std::fmt::Debug for ParallelEngine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParallelEngine").field("threads", &self.threads()).finish()
    }
}

impl PathEngine for ParallelEngine {
    fn run(&self, spec: &SimulationSpec) -> Result<SimulationRun> {
        let plan = PathPlan::new(spec)?;
        let tallies: Vec<Tally> = self
            .pool
            .install(|| (0..spec.n_chunks()).into_par_iter().map(|c| plan.simulate(spec.chunk_range(c))).collect());
        let mut total = plan.empty_tally();
        for t in tallies {
            total.merge(t);
        }
        Ok(plan.finish(spec, total))
    }
}
