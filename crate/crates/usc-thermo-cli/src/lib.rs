//! Command-line front end for the `usc-thermo` library: parameter sweeps
//! with deterministic, machine-readable output and a validation suite.

pub mod config;
pub mod grid;
pub mod rows;
pub mod sweep;
pub mod validate;

use anyhow::Result;

use sweep::{SweepOutcome, SweepSpec};

/// Worker count: the `--threads` flag (or all cores), capped by the
/// `USC_THERMO_THREADS` environment variable.
pub fn effective_threads(flag: Option<usize>) -> usize {
    let base = flag.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    let cap = std::env::var("USC_THERMO_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&c| c >= 1);
    match cap {
        Some(c) => base.min(c).max(1),
        None => base.max(1),
    }
}

/// Runs the sweep inside a dedicated thread pool of the given size.
pub fn run_sweep_with_threads(spec: &SweepSpec, threads: usize) -> Result<SweepOutcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;
    pool.install(|| sweep::run_sweep(spec))
}

/// Sweep straight to CSV bytes; identical bytes for any worker count.
pub fn sweep_csv_bytes(spec: &SweepSpec, threads: usize) -> Result<(Vec<u8>, usize)> {
    let outcome = run_sweep_with_threads(spec, threads)?;
    let mut buf = Vec::new();
    rows::write_csv(&mut buf, &outcome.meta, &outcome.rows)?;
    Ok((buf, outcome.failed_points))
}
