//! Command-line interface: `run`, `bench` and `summarize`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nmgo_core::PROBLEM_NAMES;

use crate::config::{ExperimentConfig, Method, Sampling, SurrogateChoice};
use crate::output::{self, FailureRow, Runs};
use crate::{run_seeds, thread_pool, write_runs};

#[derive(Debug, Parser)]
#[command(
    name = "nmgo",
    version,
    about = "Nonmyopic surrogate-based global optimization experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment over several seeds.
    Run(RunArgs),
    /// Run a predefined grid of experiments.
    Bench(BenchArgs),
    /// Rebuild summary.csv, convergence.csv and plot.gp from run files.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

/// Flags override the values read from `--config`.
#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// JSON file with an experiment config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub problem: Option<String>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long, value_enum)]
    pub surrogate: Option<SurrogateChoice>,
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Branch counts per stage, e.g. `10,5`.
    #[arg(long, value_delimiter = ',')]
    pub samples: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    pub sampling: Option<Sampling>,
    /// Optimization iterations after the warm-up.
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub warmup: Option<usize>,
    /// Comma-separated seeds, or a single number `k` meaning seeds `0..k`.
    #[arg(long)]
    pub seeds: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Suite {
    /// Every synthetic problem with the myopic, rollout (H = 2..5) and
    /// multi-step (H = 2..3) methods.
    Synthetic,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long)]
    pub out: PathBuf,
    /// Seeds as for `run` (default 30).
    #[arg(long, default_value = "30")]
    pub seeds: String,
    #[arg(long, default_value_t = 50)]
    pub iters: usize,
    /// Restrict to these problems.
    #[arg(long, value_delimiter = ',')]
    pub problems: Option<Vec<String>>,
}

/// Parses `--seeds`: a list `1,5,9` or a count `30`.
pub fn parse_seeds(s: &str) -> anyhow::Result<Vec<u64>> {
    let s = s.trim();
    if s.contains(',') {
        s.split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| Ok(p.trim().parse()?))
            .collect()
    } else {
        let n: u64 = s.parse()?;
        Ok((0..n).collect())
    }
}

impl RunArgs {
    /// Reads `--config` (if any) and applies the flag overrides.
    pub fn to_config(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = &self.problem {
            cfg.problem = v.clone();
        }
        if let Some(v) = self.method {
            cfg.method = v;
        }
        if let Some(v) = self.surrogate {
            cfg.surrogate = Some(v);
        }
        if let Some(v) = self.horizon {
            cfg.horizon = v;
        }
        if let Some(v) = &self.samples {
            cfg.samples = v.clone();
        }
        if let Some(v) = self.sampling {
            cfg.sampling = v;
        }
        if let Some(v) = self.iters {
            cfg.iters = v;
        }
        if let Some(v) = self.warmup {
            cfg.warmup = Some(v);
        }
        if let Some(v) = &self.seeds {
            cfg.seeds = parse_seeds(v)?;
        }
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        Ok(cfg)
    }
}

/// The configurations of a benchmark suite.
pub fn suite_configs(
    suite: Suite,
    problems: &[String],
    iters: usize,
    seeds: &[u64],
) -> Vec<ExperimentConfig> {
    let Suite::Synthetic = suite;
    let mut out = Vec::new();
    for problem in problems {
        let base = ExperimentConfig {
            problem: problem.clone(),
            iters,
            seeds: seeds.to_vec(),
            ..ExperimentConfig::default()
        };
        out.push(ExperimentConfig {
            method: Method::Myopic,
            ..base.clone()
        });
        for sampling in [Sampling::Mc, Sampling::Gh] {
            for horizon in 2..=5 {
                out.push(ExperimentConfig {
                    method: Method::Rollout,
                    horizon,
                    sampling,
                    ..base.clone()
                });
            }
            for horizon in 2..=3 {
                out.push(ExperimentConfig {
                    method: Method::Multistep,
                    horizon,
                    sampling,
                    ..base.clone()
                });
            }
        }
    }
    out
}

/// Runs each config into `out`, then writes the reports over all of them.
pub fn execute(out: &Path, configs: &[ExperimentConfig]) -> anyhow::Result<()> {
    let pool = thread_pool()?;
    std::fs::create_dir_all(out)?;
    let mut runs: Runs = Vec::new();
    let mut failures: Vec<FailureRow> = Vec::new();
    for cfg in configs {
        let exp = cfg.resolve()?;
        eprintln!(
            "{} {} ({} seeds, {} iterations)",
            exp.problem.name(),
            exp.method_tag(),
            cfg.seeds.len(),
            exp.iters
        );
        let outcomes = run_seeds(&pool, &exp, &cfg.seeds);
        let (good, bad) = write_runs(out, &exp, &outcomes)?;
        runs.extend(good);
        failures.extend(bad);
    }
    std::fs::write(
        out.join("config.json"),
        serde_json::to_string_pretty(configs)?,
    )?;
    output::write_rows(&out.join("failures.csv"), &failures)?;
    for row in output::write_reports(out, &runs)? {
        eprintln!(
            "{:>15} {:>9} {} H={} {:>4}  mean {:.3}  median {:.3}  {:.3}s/iter",
            row.problem,
            row.method,
            row.surrogate,
            row.horizon,
            row.sampling,
            row.mean_gap,
            row.median_gap,
            row.mean_iter_seconds
        );
    }
    if !failures.is_empty() {
        eprintln!("{} run(s) listed in failures.csv", failures.len());
    }
    Ok(())
}

pub fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run(args) => {
            let cfg = args.to_config()?;
            execute(&cfg.out.clone(), &[cfg])
        }
        Command::Bench(args) => {
            let problems: Vec<String> = match args.problems {
                Some(p) => p,
                None => PROBLEM_NAMES.iter().map(|s| s.to_string()).collect(),
            };
            let seeds = parse_seeds(&args.seeds)?;
            execute(
                &args.out,
                &suite_configs(args.suite, &problems, args.iters, &seeds),
            )
        }
        Command::Summarize { input } => {
            let runs = output::read_runs(&input)?;
            let summary = output::write_reports(&input, &runs)?;
            eprintln!(
                "{} group(s) written to {}",
                summary.len(),
                input.join("summary.csv").display()
            );
            Ok(())
        }
    }
}
