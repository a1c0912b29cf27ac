//! Experiment driver for nonmyopic surrogate-based global optimization.
//!
//! Runs seeded repetitions of the optimization loop on the synthetic
//! benchmarks, writes one CSV per run and aggregates optimality gaps into
//! summary and convergence tables.

pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod gap;
pub mod output;
pub mod run;

use std::path::Path;

use rayon::prelude::*;

pub use config::{Experiment, ExperimentConfig, Method, Sampling, SurrogateChoice};
pub use gap::{optimality_gap, DegenerateGap};
pub use output::{summarize, RunRow, SummaryRow};
pub use run::{run_algorithm, run_algorithm_with, Phase, RunOutcome, RunRecord, RunStatus};

use checkpoint::RbfCheckpoint;
use nmgo_core::Surrogate;

/// Worker pool sized by `NMGO_THREADS` when set, else by the hardware.
pub fn thread_pool() -> anyhow::Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("NMGO_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("NMGO_THREADS must be a positive integer, got {v:?}"))?;
        anyhow::ensure!(n >= 1, "NMGO_THREADS must be at least 1");
        builder = builder.num_threads(n);
    }
    Ok(builder.build()?)
}

/// Runs every seed of `exp` in parallel; results come back in seed order.
pub fn run_seeds(pool: &rayon::ThreadPool, exp: &Experiment, seeds: &[u64]) -> Vec<RunOutcome> {
    pool.install(|| seeds.par_iter().map(|&s| run_algorithm(exp, s)).collect())
}

/// Writes the per-run CSVs and RBF checkpoints of `outcomes` under `out`
/// and returns the rows of the runs that produced a gap, plus failures.
pub fn write_runs(
    out: &Path,
    exp: &Experiment,
    outcomes: &[RunOutcome],
) -> anyhow::Result<(output::Runs, Vec<output::FailureRow>)> {
    let mut good = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        let rows = output::run_rows(exp, o);
        output::write_rows(&output::run_file(out, exp, o.seed), &rows)?;
        if let Some(Surrogate::Rbf(state)) = &o.model {
            let dir = out.join("checkpoints");
            std::fs::create_dir_all(&dir)?;
            let name = format!(
                "{}_{}_{}.json",
                exp.problem.name(),
                exp.method_tag(),
                o.seed
            );
            RbfCheckpoint::from_state(state).save(&dir.join(name))?;
        }
        match output::failure_row(exp, o) {
            Some(f) => failures.push(f),
            None => good.push(rows),
        }
    }
    Ok((good, failures))
}
