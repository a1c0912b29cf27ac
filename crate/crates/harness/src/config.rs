//! Experiment configuration: the JSON file format and its resolution into
//! concrete core settings.

use std::fmt;
use std::path::PathBuf;

use nmgo_core::acquisition::{AcquisitionParams, GaussHermiteRule};
use nmgo_core::{
    get_problem, BenchmarkProblem, LookaheadConfig, RbfConfig, SamplingKind, SamplingScheme,
    SolveConfig, Strategy, SurrogateKind,
};
use serde::{Deserialize, Serialize};

/// Acquisition strategy as written in configs and CSVs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// One-step `Lambda^s`.
    Myopic,
    /// Single sampled trajectory.
    Rollout,
    /// Scenario tree.
    Multistep,
}

impl Method {
    /// Core strategy.
    pub fn strategy(self) -> Strategy {
        match self {
            Method::Myopic => Strategy::Myopic,
            Method::Rollout => Strategy::Rollout,
            Method::Multistep => Strategy::Multistep,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Myopic => "myopic",
            Method::Rollout => "rollout",
            Method::Multistep => "multistep",
        })
    }
}

/// Surrogate model choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SurrogateChoice {
    /// Inverse distance weighting.
    Idw,
    /// Radial basis functions.
    Rbf,
}

impl From<SurrogateChoice> for SurrogateKind {
    fn from(s: SurrogateChoice) -> Self {
        match s {
            SurrogateChoice::Idw => SurrogateKind::Idw,
            SurrogateChoice::Rbf => SurrogateKind::Rbf,
        }
    }
}

impl From<SurrogateKind> for SurrogateChoice {
    fn from(s: SurrogateKind) -> Self {
        match s {
            SurrogateKind::Idw => SurrogateChoice::Idw,
            SurrogateKind::Rbf => SurrogateChoice::Rbf,
        }
    }
}

impl fmt::Display for SurrogateChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SurrogateChoice::Idw => "idw",
            SurrogateChoice::Rbf => "rbf",
        })
    }
}

/// Fantasy sampling rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    /// Quasi-Monte Carlo normal draws.
    Mc,
    /// Gauss-Hermite nodes.
    Gh,
}

impl From<Sampling> for SamplingKind {
    fn from(s: Sampling) -> Self {
        match s {
            Sampling::Mc => SamplingKind::Qmc,
            Sampling::Gh => SamplingKind::GaussHermite,
        }
    }
}

impl fmt::Display for Sampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sampling::Mc => "mc",
            Sampling::Gh => "gh",
        })
    }
}

/// Inner solver settings; `n_starts` defaults by method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub max_iterations: usize,
    pub memory: usize,
    pub gradient_step: f64,
    pub tolerance: f64,
    pub ftol: f64,
    pub n_starts: Option<usize>,
    pub tie_tolerance: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let d = SolveConfig::default();
        Self {
            max_iterations: d.max_iterations,
            memory: d.memory,
            gradient_step: d.gradient_step,
            tolerance: d.tolerance,
            ftol: d.ftol,
            n_starts: None,
            tie_tolerance: d.tie_tolerance,
        }
    }
}

/// One experiment as stored in a JSON config file.
///
/// Optional fields fall back to values derived from the problem: `surrogate`
/// to the problem default, `warmup` to `2n`, `lambda` to `1/n`, `mu` to
/// `0.5/n` and `eps` to `1/n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: String,
    pub method: Method,
    pub surrogate: Option<SurrogateChoice>,
    pub horizon: usize,
    pub samples: Vec<usize>,
    pub sampling: Sampling,
    /// Optimization iterations after the warm-up.
    pub iters: usize,
    pub warmup: Option<usize>,
    pub seeds: Vec<u64>,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub eps: Option<f64>,
    pub delta: f64,
    pub svd_threshold: f64,
    pub schur_tol: f64,
    pub q: usize,
    pub solver: SolverSettings,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: "branin".into(),
            method: Method::Myopic,
            surrogate: None,
            horizon: 2,
            samples: vec![10, 5],
            sampling: Sampling::Mc,
            iters: 50,
            warmup: None,
            seeds: (0..30).collect(),
            lambda: None,
            mu: None,
            eps: None,
            delta: 1e-12,
            svd_threshold: 1e-8,
            schur_tol: 1e-8,
            q: 16,
            solver: SolverSettings::default(),
            out: PathBuf::from("results"),
        }
    }
}

/// A config with every default filled in and validated.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub problem: BenchmarkProblem,
    pub method: Method,
    pub surrogate: SurrogateChoice,
    pub horizon: usize,
    pub samples: Vec<usize>,
    pub sampling: Sampling,
    pub iters: usize,
    pub warmup: usize,
    pub delta: f64,
    pub rbf: RbfConfig,
    pub lookahead: LookaheadConfig,
}

impl ExperimentConfig {
    /// Parses a JSON config.
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Fills in problem-dependent defaults and builds the core settings.
    pub fn resolve(&self) -> anyhow::Result<Experiment> {
        let problem = get_problem(&self.problem)?;
        let n = problem.dim() as f64;
        anyhow::ensure!(self.horizon >= 1, "horizon must be at least 1");
        anyhow::ensure!(
            !self.samples.is_empty() && !self.samples.contains(&0),
            "branch counts must be positive"
        );
        let warmup = self.warmup.unwrap_or(2 * problem.dim());
        anyhow::ensure!(warmup >= 1, "warm-up needs at least one point");
        let scaled = AcquisitionParams::scaled_for_dim(problem.dim());
        let params = AcquisitionParams::new(
            self.lambda.unwrap_or(scaled.lambda),
            self.mu.unwrap_or(scaled.mu),
        )?;
        let surrogate = self
            .surrogate
            .unwrap_or_else(|| problem.surrogate_default().into());
        let horizon = match self.method {
            Method::Myopic => 1,
            _ => self.horizon,
        };
        let default_starts = match self.method {
            Method::Multistep => SolveConfig::multistep().n_starts,
            _ => SolveConfig::default().n_starts,
        };
        let s = &self.solver;
        let solver = SolveConfig {
            max_iterations: s.max_iterations,
            memory: s.memory,
            gradient_step: s.gradient_step,
            tolerance: s.tolerance,
            ftol: s.ftol,
            n_starts: s.n_starts.unwrap_or(default_starts),
            tie_tolerance: s.tie_tolerance,
        };
        let samples = match self.method {
            Method::Multistep => self.samples.clone(),
            _ => vec![1],
        };
        let lookahead = LookaheadConfig {
            strategy: self.method.strategy(),
            horizon,
            scheme: SamplingScheme::new(self.sampling.into(), samples.clone())?,
            params,
            rule: GaussHermiteRule::new(self.q)?,
            solver,
        };
        let rbf = RbfConfig {
            eps: self.eps.unwrap_or(1.0 / n),
            svd_threshold: self.svd_threshold,
            schur_tol: self.schur_tol,
            delta: self.delta,
        };
        Ok(Experiment {
            problem,
            method: self.method,
            surrogate,
            horizon,
            samples,
            sampling: self.sampling,
            iters: self.iters,
            warmup,
            delta: self.delta,
            rbf,
            lookahead,
        })
    }
}

impl Experiment {
    /// Last query index `N = N0 + iters - 1`, so that a run observes
    /// `N + 1` points in total.
    pub fn last_index(&self) -> usize {
        self.warmup + self.iters - 1
    }

    /// File-name tag such as `myopic`, `rollout-h2-mc` or
    /// `multistep-h3-gh-10x5`.
    pub fn method_tag(&self) -> String {
        match self.method {
            Method::Myopic => "myopic".into(),
            Method::Rollout => format!("rollout-h{}-{}", self.horizon, self.sampling),
            Method::Multistep => {
                let m: Vec<String> = self.samples.iter().map(ToString::to_string).collect();
                format!(
                    "multistep-h{}-{}-{}",
                    self.horizon,
                    self.sampling,
                    m.join("x")
                )
            }
        }
    }

    /// Sampling label for result files; the myopic method has none.
    pub fn sampling_label(&self) -> String {
        match self.method {
            Method::Myopic => "none".into(),
            _ => self.sampling.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_dimension() {
        let cfg = ExperimentConfig {
            problem: "hartman6".into(),
            ..Default::default()
        };
        let e = cfg.resolve().unwrap();
        assert_eq!(e.warmup, 12);
        assert_eq!(e.surrogate, SurrogateChoice::Rbf);
        assert!((e.lookahead.params.lambda - 1.0 / 6.0).abs() < 1e-15);
        assert!((e.lookahead.params.mu - 0.5 / 6.0).abs() < 1e-15);
        assert!((e.rbf.eps - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(e.rbf.delta, 1e-12);
        assert_eq!(e.lookahead.rule.order(), 16);
        assert_eq!(e.iters, 50);
    }

    #[test]
    fn json_round_trip_and_partial_files() {
        let cfg = ExperimentConfig::from_json(
            r#"{"problem": "ackley", "method": "rollout", "horizon": 3}"#,
        )
        .unwrap();
        assert_eq!(cfg.method, Method::Rollout);
        assert_eq!(cfg.samples, vec![10, 5]);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
        assert!(ExperimentConfig::from_json(r#"{"problm": "x"}"#).is_err());
    }

    #[test]
    fn method_tags() {
        let mut cfg = ExperimentConfig {
            method: Method::Multistep,
            horizon: 3,
            sampling: Sampling::Gh,
            ..Default::default()
        };
        assert_eq!(cfg.resolve().unwrap().method_tag(), "multistep-h3-gh-10x5");
        cfg.method = Method::Rollout;
        assert_eq!(cfg.resolve().unwrap().method_tag(), "rollout-h3-gh");
        cfg.method = Method::Myopic;
        assert_eq!(cfg.resolve().unwrap().method_tag(), "myopic");
    }
}
