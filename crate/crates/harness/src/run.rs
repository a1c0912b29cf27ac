//! The optimization loop: warm-up design, then one acquisition solve and
//! one function evaluation per iteration.

use std::time::Instant;

use nmgo_core::dataset::{uniform_point, warmup_sample};
use nmgo_core::{next_query, Dataset, RandomStream, StreamLabel, Surrogate, DUP_TOL};

use crate::config::Experiment;
use crate::gap::optimality_gap;

/// Whether a record comes from the random design or from a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Warmup,
    Query,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Warmup => "warmup",
            Phase::Query => "query",
        }
    }
}

/// One evaluated sample.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    /// 1-based sample index.
    pub iteration: usize,
    pub phase: Phase,
    pub x: Vec<f64>,
    pub f: f64,
    /// Best value observed so far, warm-up included.
    pub incumbent: f64,
    /// `None` when the gap is undefined for this run.
    pub gap: Option<f64>,
    /// Wall time of the acquisition solve (zero for warm-up records).
    pub solve_seconds: f64,
}

/// How a run ended.
#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Completed,
    Failed(String),
}

/// Records plus the final model.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub seed: u64,
    pub records: Vec<RunRecord>,
    pub status: RunStatus,
    /// Set when the warm-up already reached `f_star`.
    pub degenerate_gap: bool,
    pub model: Option<Surrogate>,
}

impl RunOutcome {
    /// Gap after the last evaluation.
    pub fn final_gap(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.gap)
    }
}

/// Runs one seeded repetition.
pub fn run_algorithm(exp: &Experiment, seed: u64) -> RunOutcome {
    run_algorithm_with(exp, seed, |_, _| {})
}

/// Like [`run_algorithm`], calling `observe(sample_count, model)` after
/// every model update.
pub fn run_algorithm_with(
    exp: &Experiment,
    seed: u64,
    mut observe: impl FnMut(usize, &Surrogate),
) -> RunOutcome {
    let problem = &exp.problem;
    let space = problem.space();
    let stream = RandomStream::new(seed);
    let mut outcome = RunOutcome {
        seed,
        records: Vec::with_capacity(exp.warmup + exp.iters),
        status: RunStatus::Completed,
        degenerate_gap: false,
        model: None,
    };

    let design = match warmup_sample(
        space,
        exp.warmup,
        &mut stream.substream(StreamLabel::Warmup),
    ) {
        Ok(d) => d,
        Err(e) => {
            outcome.status = RunStatus::Failed(e.to_string());
            return outcome;
        }
    };
    let mut data = Dataset::new(space.clone());
    let mut best = f64::INFINITY;
    let mut values = Vec::with_capacity(design.len());
    for x in &design {
        let f = problem.evaluate_unchecked(x);
        data.push(x, f)
            .expect("warm-up points are distinct and in the box");
        values.push(f);
    }
    let initial_best = values.iter().copied().fold(f64::INFINITY, f64::min);
    let f_star = problem.f_star();
    outcome.degenerate_gap = optimality_gap(initial_best, initial_best, f_star).is_err();
    let gap = |incumbent: f64| optimality_gap(initial_best, incumbent, f_star).ok();
    for (i, (x, f)) in design.into_iter().zip(values).enumerate() {
        best = best.min(f);
        outcome.records.push(RunRecord {
            seed,
            iteration: i + 1,
            phase: Phase::Warmup,
            x,
            f,
            incumbent: best,
            gap: gap(initial_best),
            solve_seconds: 0.0,
        });
    }

    let mut model = match Surrogate::fit(exp.surrogate.into(), data, exp.delta, &exp.rbf) {
        Ok(m) => m,
        Err(e) => {
            outcome.status = RunStatus::Failed(e.to_string());
            return outcome;
        }
    };
    observe(model.data().len(), &model);

    let last = exp.last_index();
    for k in exp.warmup..=last {
        let start = Instant::now();
        let query = next_query(&model, k, last, &exp.lookahead, &stream);
        let solve_seconds = start.elapsed().as_secs_f64();
        let mut x = match query {
            Ok(x) => x,
            Err(e) => {
                outcome.status = RunStatus::Failed(e.to_string());
                break;
            }
        };
        if model
            .data()
            .nearest(&x)
            .is_some_and(|(_, d2)| d2 <= DUP_TOL)
        {
            let mut rng = stream.substream_indexed(StreamLabel::TieBreaking, k as u32);
            while model
                .data()
                .nearest(&x)
                .is_some_and(|(_, d2)| d2 <= DUP_TOL)
            {
                x = uniform_point(space, &mut rng);
            }
        }
        let f = problem.evaluate_unchecked(&x);
        model = match model.partial_fit(&x, f) {
            Ok(m) => m,
            Err(e) => {
                outcome.status = RunStatus::Failed(e.to_string());
                break;
            }
        };
        observe(model.data().len(), &model);
        best = best.min(f);
        outcome.records.push(RunRecord {
            seed,
            iteration: k + 1,
            phase: Phase::Query,
            x,
            f,
            incumbent: best,
            gap: gap(best),
            solve_seconds,
        });
    }
    outcome.model = Some(model);
    outcome
}
