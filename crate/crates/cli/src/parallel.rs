//! Rayon-backed node evaluation.

use rayon::prelude::*;
use taubnut_core::quadrature::Evaluator;

/// Evaluates nodes on the current rayon pool. Values come back in index
/// order and the reported error is the one with the lowest index, so results
/// do not depend on the number of workers.
#[derive(Clone, Copy, Debug, Default)]
pub struct Rayon;

impl Evaluator for Rayon {
    fn evaluate(
        &self,
        n: usize,
        f: &(dyn Fn(usize) -> taubnut_core::Result<f64> + Sync),
    ) -> taubnut_core::Result<Vec<f64>> {
        let results: Vec<_> = (0..n).into_par_iter().map(f).collect();
        results.into_iter().collect()
    }
}

/// Environment variable read for the worker count when `--workers` is absent.
pub const WORKERS_ENV: &str = "TAUBNUT_WORKERS";

/// Sizes the global pool. Has no effect if the pool is already running.
pub fn init_workers(workers: Option<usize>) {
    if let Some(n) = workers.filter(|n| *n > 0) {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}
