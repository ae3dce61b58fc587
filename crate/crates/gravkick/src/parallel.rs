//! Thread-pool fan-out for Monte Carlo and sweeps. Results are gathered in
//! index order, so output does not depend on the worker count.

use gravkick_core::feasibility::{evaluate_case, FeasibilityCase, ProtocolParams};
use gravkick_core::montecarlo::{EnsembleStats, Sampler};
use gravkick_core::units::Constants;
use rayon::prelude::*;

use crate::error::{CliError, Result};

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))
}

pub fn run_ensemble(sampler: &Sampler, workers: usize) -> Result<EnsembleStats> {
    let chunks: Vec<_> =
        pool(workers)?.install(|| (0..sampler.chunk_count()).into_par_iter().map(|c| sampler.run_chunk(c)).collect());
    Ok(sampler.finish(chunks))
}

pub fn evaluate_all(points: &[ProtocolParams], c: &Constants, workers: usize) -> Result<Vec<FeasibilityCase>> {
    let cases: gravkick_core::Result<Vec<_>> =
        pool(workers)?.install(|| points.par_iter().map(|p| evaluate_case(p, c)).collect());
    Ok(cases?)
}
