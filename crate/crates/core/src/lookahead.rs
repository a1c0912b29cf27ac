//! Nonmyopic acquisition objectives over fantasized observations.
//!
//! A plan of `h` future queries `xhat_1, ..., xhat_h` is scored by summing
//! `Lambda^s` along a scenario tree. At stage `t` every node holds the real
//! data extended by `t` fantasy pairs; the fantasy points are the shared
//! decision variables, while the fantasy values differ per branch and come
//! from the reparametrized posterior `fhat(x) + sigma(x) z`. Because all
//! nodes at one depth share their sample locations, IDW weights, `zeta`, and
//! for RBF the kernel column and the blockwise inverse are computed once per
//! stage; only values and coefficients are carried per node.
//!
//! The rollout objective is the single-branch tree (`m_t = 1`).

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::acquisition::{
    combine, expected_sigma, stochastic_acquisition, AcquisitionParams, GaussHermiteRule,
};
use crate::dataset::{sq_dist, value_range, DUP_TOL};
use crate::error::{Error, Result};
use crate::linalg::{dot, symmetric_pinv, Matrix};
use crate::qmc::QmcNormal;
use crate::random::{RandomStream, StreamLabel};
use crate::solver::{minimize_box, SolveConfig};
use crate::surrogate::{
    blockwise_extend, distance_from_weight_sum, dot_values, interpolation_matrix,
    kernel_column_into, raw_weights_into, PointMoments, Surrogate,
};

/// How fantasy observations are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplingKind {
    /// Quasi-random normal draws, equally weighted.
    Qmc,
    /// Gauss-Hermite nodes `sqrt(2) x_j` with their probability weights.
    GaussHermite,
}

/// Sampling kind and per-stage branch counts `m_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplingScheme {
    /// Draw rule.
    pub kind: SamplingKind,
    /// Branch counts for the branching stages; the last entry is reused when
    /// the horizon needs more stages.
    pub branches: Vec<usize>,
}

impl SamplingScheme {
    /// Checks that there is at least one count and all are positive.
    pub fn new(kind: SamplingKind, branches: Vec<usize>) -> Result<Self> {
        if branches.is_empty() || branches.contains(&0) {
            return Err(Error::InvalidParameter("branch counts must be positive"));
        }
        Ok(Self { kind, branches })
    }

    /// Single-branch scheme.
    pub fn rollout(kind: SamplingKind) -> Self {
        Self {
            kind,
            branches: vec![1],
        }
    }

    /// Branch counts for `stages` branching stages.
    pub fn branches_for(&self, stages: usize) -> Vec<usize> {
        let last = *self.branches.last().unwrap_or(&1);
        (0..stages)
            .map(|t| self.branches.get(t).copied().unwrap_or(last))
            .collect()
    }
}

/// A fixed table of standard-normal draws and branch weights for one tree.
///
/// Stage `t` holds `m_t` entries per node at depth `t`, flattened by node
/// index: entry `i * m_t + j` is branch `j` of node `i`. Holding the table
/// fixed makes the objective a deterministic function of the plan.
#[derive(Debug, Clone, PartialEq)]
pub struct Draws {
    branches: Vec<usize>,
    stages: Vec<Vec<(f64, f64)>>,
}

impl Draws {
    /// One branch per stage at the posterior mean (`z = 0`).
    pub fn mean(stages: usize) -> Self {
        Self {
            branches: vec![1; stages],
            stages: vec![vec![(0.0, 1.0)]; stages],
        }
    }

    /// Gauss-Hermite branching: `m_t` nodes of the order-`m_t` rule.
    pub fn gauss_hermite(branches: &[usize]) -> Result<Self> {
        let mut stages = Vec::with_capacity(branches.len());
        let mut nodes = 1usize;
        for &m in branches {
            let rule = GaussHermiteRule::new(m)?;
            let block: Vec<(f64, f64)> = rule
                .normal_points()
                .zip(rule.weights().iter().copied())
                .collect();
            stages.push(block.repeat(nodes));
            nodes *= m;
        }
        Ok(Self {
            branches: branches.to_vec(),
            stages,
        })
    }

    /// Quasi-random branching with weights `1/m_t`, from one shifted
    /// sequence seeded by `rng`.
    pub fn qmc<R: Rng + ?Sized>(branches: &[usize], rng: &mut R) -> Result<Self> {
        if branches.contains(&0) {
            return Err(Error::InvalidParameter("branch counts must be positive"));
        }
        let mut seq = QmcNormal::new(rng);
        let mut stages = Vec::with_capacity(branches.len());
        let mut nodes = 1usize;
        for &m in branches {
            let w = 1.0 / m as f64;
            stages.push((0..nodes * m).map(|_| (seq.next_normal(), w)).collect());
            nodes *= m;
        }
        Ok(Self {
            branches: branches.to_vec(),
            stages,
        })
    }

    /// Draws for `stages` branching stages of `scheme`.
    pub fn for_scheme<R: Rng + ?Sized>(
        scheme: &SamplingScheme,
        stages: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let branches = scheme.branches_for(stages);
        match scheme.kind {
            SamplingKind::Qmc => Self::qmc(&branches, rng),
            SamplingKind::GaussHermite => Self::gauss_hermite(&branches),
        }
    }

    /// Explicit `(z, weight)` table; checks the sizes against `branches`.
    pub fn from_table(branches: Vec<usize>, stages: Vec<Vec<(f64, f64)>>) -> Result<Self> {
        if branches.len() != stages.len() || branches.contains(&0) {
            return Err(Error::InvalidParameter(
                "draw table does not match branches",
            ));
        }
        let mut nodes = 1usize;
        for (m, s) in branches.iter().zip(&stages) {
            if s.len() != nodes * m {
                return Err(Error::InvalidParameter(
                    "draw table does not match branches",
                ));
            }
            nodes *= m;
        }
        Ok(Self { branches, stages })
    }

    /// Branch counts.
    pub fn branches(&self) -> &[usize] {
        &self.branches
    }

    /// Number of branching stages.
    pub fn stages(&self) -> usize {
        self.branches.len()
    }

    /// Entries of stage `t`.
    pub fn stage(&self, t: usize) -> &[(f64, f64)] {
        &self.stages[t]
    }

    /// Number of leaves `prod m_t`.
    pub fn leaves(&self) -> usize {
        self.branches.iter().product()
    }

    /// Path weights of all nodes, depth by depth (the root has weight 1).
    pub fn path_weights(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![1.0]];
        for (t, &m) in self.branches.iter().enumerate() {
            let parent = &out[t];
            let next = self.stages[t]
                .iter()
                .enumerate()
                .map(|(e, &(_, w))| parent[e / m] * w)
                .collect();
            out.push(next);
        }
        out
    }
}

/// Horizon bookkeeping for one acquisition solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HorizonPlan {
    horizon: usize,
    effective: usize,
    dim: usize,
}

impl HorizonPlan {
    /// `h = min(H, N - k + 1)` at iteration `k` of a run ending at `N`.
    pub fn new(horizon: usize, k: usize, n_total: usize, dim: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be at least 1"));
        }
        if k > n_total {
            return Err(Error::InvalidParameter("iteration beyond the budget"));
        }
        Ok(Self {
            horizon,
            effective: horizon.min(n_total - k + 1),
            dim,
        })
    }

    /// Plan with effective horizon `h` equal to the configured one.
    pub fn fixed(h: usize, dim: usize) -> Result<Self> {
        Self::new(h, 0, h - 1, dim).map_err(|_| Error::DegenerateHorizon(h))
    }

    /// Configured `H`.
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Effective `h`.
    pub fn effective(&self) -> usize {
        self.effective
    }

    /// Problem dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Length `h * n` of the stacked decision vector.
    pub fn decision_len(&self) -> usize {
        self.effective * self.dim
    }

    /// `xhat_{k+1|k}`, the block that becomes the next query.
    pub fn first_block<'a>(&self, decisions: &'a [f64]) -> &'a [f64] {
        &decisions[..self.dim]
    }
}

/// Acquisition strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Minimize `Lambda^s` one step ahead.
    Myopic,
    /// Single sampled trajectory over the horizon.
    Rollout,
    /// Full scenario tree over the horizon.
    Multistep,
}

/// Everything [`next_query`] needs besides the model.
#[derive(Debug, Clone, PartialEq)]
pub struct LookaheadConfig {
    /// Strategy.
    pub strategy: Strategy,
    /// Configured horizon `H` (ignored by [`Strategy::Myopic`]).
    pub horizon: usize,
    /// Fantasy sampling; rollout forces one branch per stage.
    pub scheme: SamplingScheme,
    /// Exploration weights.
    pub params: AcquisitionParams,
    /// Rule for `E[sigma]`.
    pub rule: GaussHermiteRule,
    /// Inner solver settings.
    pub solver: SolveConfig,
}

/// Reparametrized posterior sample `fhat(x) + sigma(x) z`.
pub fn sample_posterior(model: &Surrogate, x: &[f64], z: f64) -> f64 {
    let m = model.moments(x, &mut Vec::new());
    m.prediction + m.sigma() * z
}

/// Multi-step tree objective for the stacked plan `decisions`.
pub fn evaluate_multistep_objective(
    model: &Surrogate,
    plan: &HorizonPlan,
    decisions: &[f64],
    draws: &Draws,
    params: &AcquisitionParams,
    rule: &GaussHermiteRule,
) -> Result<f64> {
    check_plan(model, plan, decisions)?;
    if draws.stages() < plan.effective - 1 {
        return Err(Error::InvalidParameter(
            "too few draw stages for the horizon",
        ));
    }
    Ok(tree_objective(model, plan, decisions, draws, params, rule))
}

/// Rollout objective: one fantasy per stage, a quasi-random draw from `rng`
/// for [`SamplingKind::Qmc`] or the posterior mean for
/// [`SamplingKind::GaussHermite`].
pub fn evaluate_rollout_objective<R: Rng + ?Sized>(
    model: &Surrogate,
    plan: &HorizonPlan,
    decisions: &[f64],
    kind: SamplingKind,
    params: &AcquisitionParams,
    rule: &GaussHermiteRule,
    rng: &mut R,
) -> Result<f64> {
    check_plan(model, plan, decisions)?;
    let draws = Draws::for_scheme(&SamplingScheme::rollout(kind), plan.effective - 1, rng)?;
    Ok(tree_objective(model, plan, decisions, &draws, params, rule))
}

fn check_plan(model: &Surrogate, plan: &HorizonPlan, decisions: &[f64]) -> Result<()> {
    if plan.effective < 2 {
        return Err(Error::DegenerateHorizon(plan.effective));
    }
    let space = model.data().space();
    if plan.dim != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: plan.dim,
        });
    }
    if decisions.len() != plan.decision_len() {
        return Err(Error::DimensionMismatch {
            expected: plan.decision_len(),
            got: decisions.len(),
        });
    }
    decisions
        .chunks_exact(plan.dim)
        .try_for_each(|x| space.check(x))
}

/// Next query at iteration `k` of a run whose last query index is `n_total`.
///
/// Randomness comes from `stream`'s substreams indexed by `k`, so a run is
/// reproducible query by query.
pub fn next_query(
    model: &Surrogate,
    k: usize,
    n_total: usize,
    config: &LookaheadConfig,
    stream: &RandomStream,
) -> Result<Vec<f64>> {
    let space = model.data().space();
    let n = space.dim();
    let horizon = match config.strategy {
        Strategy::Myopic => 1,
        _ => config.horizon,
    };
    let plan = HorizonPlan::new(horizon, k, n_total, n)?;
    let index = k as u32;
    let mut starts = stream.substream_indexed(StreamLabel::Multistart, index);
    let (params, rule) = (&config.params, &config.rule);

    if plan.effective == 1 {
        let best = minimize_box(
            |x| stochastic_acquisition(model, params, x, rule),
            space.lower(),
            space.upper(),
            &config.solver,
            &mut starts,
        )?;
        return Ok(best.point);
    }

    let mut posterior = stream.substream_indexed(StreamLabel::PosteriorSampling, index);
    let scheme = match config.strategy {
        Strategy::Rollout => SamplingScheme::rollout(config.scheme.kind),
        _ => config.scheme.clone(),
    };
    let draws = Draws::for_scheme(&scheme, plan.effective - 1, &mut posterior)?;
    let stacked = space.repeat(plan.effective);
    let best = minimize_box(
        |u| tree_objective(model, &plan, u, &draws, params, rule),
        stacked.lower(),
        stacked.upper(),
        &config.solver,
        &mut starts,
    )?;
    Ok(plan.first_block(&best.point).to_vec())
}

struct Node {
    values: Vec<f64>,
    coeffs: Vec<f64>,
    weight: f64,
    lo: f64,
    hi: f64,
}

/// Shared RBF inverse for the current depth.
struct StageInverse {
    inverse: Matrix,
    exact: bool,
}

fn tree_objective(
    model: &Surrogate,
    plan: &HorizonPlan,
    decisions: &[f64],
    draws: &Draws,
    params: &AcquisitionParams,
    rule: &GaussHermiteRule,
) -> f64 {
    let data = model.data();
    let n = plan.dim;
    let h = plan.effective;
    let delta = model.delta();
    let (lo, hi) = value_range(data.values()).unwrap_or((0.0, 0.0));
    let real_range = hi - lo;

    let rbf = match model {
        Surrogate::Rbf(m) => Some(m),
        Surrogate::Idw(_) => None,
    };
    let mut inverse = rbf.map(|m| StageInverse {
        inverse: m.inverse().clone(),
        exact: m.is_exact_inverse(),
    });

    let mut points = Vec::with_capacity(data.points_flat().len() + h * n);
    points.extend_from_slice(data.points_flat());
    let mut nodes = vec![Node {
        values: data.values().to_vec(),
        coeffs: rbf.map_or_else(Vec::new, |m| m.coeffs().to_vec()),
        weight: 1.0,
        lo,
        hi,
    }];

    let mut weights = Vec::with_capacity(data.len() + h);
    let mut phi = Vec::new();
    let mut moments = Vec::new();
    let mut total = 0.0;

    for t in 0..h {
        let x = &decisions[t * n..(t + 1) * n];
        let weight_sum = raw_weights_into(&points, n, x, delta, &mut weights);
        let inv_sum = 1.0 / weight_sum;
        weights.iter_mut().for_each(|w| *w *= inv_sum);
        let zeta = distance_from_weight_sum(weight_sum);
        if let Some(m) = rbf {
            kernel_column_into(&points, n, x, &m.kernel(), &mut phi);
        }

        moments.clear();
        let mut stage = 0.0;
        for node in &nodes {
            let prediction = match rbf {
                Some(_) => dot(&phi, &node.coeffs),
                None => dot_values(&weights, &node.values),
            };
            let mut spread = 0.0;
            let mut bias = 0.0;
            for (v, f) in weights.iter().zip(&node.values) {
                let r = prediction - f;
                bias += v * r;
                spread += v * r * r;
            }
            let m = PointMoments {
                prediction,
                spread: spread.max(0.0),
                bias,
                weight_sum,
            };
            let value = combine(
                params,
                prediction,
                expected_sigma(&m, rule),
                node.hi - node.lo,
                zeta,
            );
            stage += node.weight * value;
            moments.push((prediction, m.sigma()));
        }
        total += stage;

        let nearest = points
            .chunks_exact(n)
            .map(|p| sq_dist(p, x))
            .fold(f64::INFINITY, f64::min);
        if nearest <= DUP_TOL {
            total += real_range / (nearest + delta);
        }

        if t + 1 == h {
            break;
        }

        let m = draws.branches[t];
        let table = &draws.stages[t];
        let mut children = Vec::with_capacity(nodes.len() * m);
        for (i, node) in nodes.iter().enumerate() {
            let (prediction, sigma) = moments[i];
            for &(z, w) in &table[i * m..(i + 1) * m] {
                let f = prediction + sigma * z;
                let mut values = Vec::with_capacity(node.values.len() + 1);
                values.extend_from_slice(&node.values);
                values.push(f);
                children.push(Node {
                    values,
                    coeffs: Vec::new(),
                    weight: node.weight * w,
                    lo: node.lo.min(f),
                    hi: node.hi.max(f),
                });
            }
        }

        if let (Some(model), Some(stage_inv)) = (rbf, inverse.as_mut()) {
            let kernel = model.kernel();
            let step = if stage_inv.exact {
                blockwise_extend(
                    &stage_inv.inverse,
                    &phi,
                    kernel.eval_sq(0.0),
                    model.config().schur_tol,
                )
            } else {
                None
            };
            match step {
                Some(step) => {
                    for (e, child) in children.iter_mut().enumerate() {
                        let parent = &nodes[e / m];
                        let r = (child.values[child.values.len() - 1] - moments[e / m].0) / step.c;
                        child.coeffs = parent
                            .coeffs
                            .iter()
                            .zip(&step.l)
                            .map(|(b, l)| b - l * r)
                            .collect();
                        child.coeffs.push(r);
                    }
                    if t + 2 < h {
                        stage_inv.inverse = step.assemble(&stage_inv.inverse);
                    }
                }
                None => {
                    let mut grown = points.clone();
                    grown.extend_from_slice(x);
                    let pinv = symmetric_pinv(
                        &interpolation_matrix(&grown, n, &kernel),
                        model.svd_threshold(),
                    );
                    for child in children.iter_mut() {
                        child.coeffs = pinv.inverse.mul_vec(&child.values);
                    }
                    *stage_inv = StageInverse {
                        inverse: pinv.inverse,
                        exact: pinv.discarded == 0,
                    };
                }
            }
        }

        points.extend_from_slice(x);
        nodes = children;
    }
    total
}
