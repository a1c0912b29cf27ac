//! Multistart box-constrained quasi-Newton minimization.
//!
//! Each start runs a projected limited-memory BFGS descent in coordinates
//! normalized to the unit box, with central finite-difference gradients and
//! an Armijo backtracking search along the projection arc. Minima whose
//! values tie (relative to `tie_tolerance`) are broken uniformly at random.

use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicUsize, Ordering};

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::dot;

/// Local solver and multistart settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    /// Iteration cap per local descent.
    pub max_iterations: usize,
    /// Number of correction pairs kept by L-BFGS.
    pub memory: usize,
    /// Finite-difference step, relative to the box width.
    pub gradient_step: f64,
    /// Projected-gradient tolerance in normalized coordinates.
    pub tolerance: f64,
    /// Relative objective decrease below which a descent stops.
    pub ftol: f64,
    /// Number of uniformly random starting points.
    pub n_starts: usize,
    /// Values within `tie_tolerance * (1 + |best|)` of the best are ties.
    pub tie_tolerance: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            memory: 10,
            gradient_step: 1e-6,
            tolerance: 1e-8,
            ftol: 1e-12,
            n_starts: 16,
            tie_tolerance: 1e-9,
        }
    }
}

impl SolveConfig {
    /// Defaults for the multi-step tree objective (fewer, costlier starts).
    pub fn multistep() -> Self {
        Self {
            n_starts: 8,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_starts == 0 {
            return Err(Error::InvalidParameter("n_starts must be at least 1"));
        }
        if !(self.tolerance > 0.0) || !(self.gradient_step > 0.0) || self.memory == 0 {
            return Err(Error::InvalidParameter(
                "tolerance, gradient step and memory must be positive",
            ));
        }
        Ok(())
    }
}

/// Best point found by [`minimize_box`].
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    /// Minimizer, inside the box.
    pub point: Vec<f64>,
    /// Objective at `point`.
    pub value: f64,
    /// Objective evaluations spent over all starts.
    pub evaluations: usize,
}

struct Scaled<'a, F> {
    objective: &'a F,
    lower: &'a [f64],
    width: Vec<f64>,
    evaluations: AtomicUsize,
}

impl<F: Fn(&[f64]) -> f64> Scaled<'_, F> {
    fn to_box(&self, u: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            u.iter()
                .zip(self.lower.iter().zip(&self.width))
                .map(|(u, (lo, w))| lo + u * w),
        );
    }

    fn eval(&self, u: &[f64], buf: &mut Vec<f64>) -> f64 {
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        self.to_box(u, buf);
        (self.objective)(buf)
    }

    fn gradient(&self, u: &[f64], h: f64, g: &mut [f64], buf: &mut Vec<f64>) {
        let mut probe = u.to_vec();
        for i in 0..u.len() {
            let hi = (u[i] + h).min(1.0);
            let lo = (u[i] - h).max(0.0);
            probe[i] = hi;
            let fp = self.eval(&probe, buf);
            probe[i] = lo;
            let fm = self.eval(&probe, buf);
            probe[i] = u[i];
            g[i] = (fp - fm) / (hi - lo);
        }
    }
}

fn descend<F: Fn(&[f64]) -> f64>(
    problem: &Scaled<'_, F>,
    start: Vec<f64>,
    cfg: &SolveConfig,
) -> Option<(Vec<f64>, f64)> {
    let n = start.len();
    let mut buf = Vec::with_capacity(n);
    let mut u = start;
    let mut fu = problem.eval(&u, &mut buf);
    if !fu.is_finite() {
        return None;
    }
    let mut g = vec![0.0; n];
    problem.gradient(&u, cfg.gradient_step, &mut g, &mut buf);
    let mut pairs: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::with_capacity(cfg.memory);
    let mut trial = vec![0.0; n];
    let mut g_new = vec![0.0; n];

    for _ in 0..cfg.max_iterations {
        if g.iter().any(|v| !v.is_finite()) {
            break;
        }
        // projected gradient: zero components pushing out of an active bound
        let pg: Vec<f64> = (0..n)
            .map(|i| {
                if (u[i] <= 0.0 && g[i] > 0.0) || (u[i] >= 1.0 && g[i] < 0.0) {
                    0.0
                } else {
                    g[i]
                }
            })
            .collect();
        let pg_norm = pg.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if pg_norm <= cfg.tolerance {
            break;
        }
        let mut d = two_loop(&pg, &pairs);
        for i in 0..n {
            if pg[i] == 0.0 {
                d[i] = 0.0;
            }
        }
        if !(dot(&d, &pg) < 0.0) {
            pairs.clear();
            d = pg.iter().map(|v| -v).collect();
        }
        let mut alpha = if pairs.is_empty() {
            let dmax = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            (0.1 / dmax).min(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..40 {
            for i in 0..n {
                trial[i] = (u[i] + alpha * d[i]).clamp(0.0, 1.0);
            }
            let step: Vec<f64> = trial.iter().zip(&u).map(|(a, b)| a - b).collect();
            if step.iter().all(|s| *s == 0.0) {
                break;
            }
            let ft = problem.eval(&trial, &mut buf);
            if ft.is_finite() && ft <= fu + 1e-4 * dot(&g, &step) {
                accepted = Some((ft, step));
                break;
            }
            alpha *= 0.5;
        }
        let Some((ft, s)) = accepted else {
            if pairs.is_empty() {
                break;
            }
            pairs.clear();
            continue;
        };
        problem.gradient(&trial, cfg.gradient_step, &mut g_new, &mut buf);
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * libm::sqrt(dot(&s, &s) * dot(&y, &y)) && sy.is_finite() {
            if pairs.len() == cfg.memory {
                pairs.remove(0);
            }
            pairs.push((s, y, 1.0 / sy));
        }
        let decrease = fu - ft;
        let scale = fu.abs().max(ft.abs()).max(1.0);
        u.copy_from_slice(&trial);
        fu = ft;
        core::mem::swap(&mut g, &mut g_new);
        if decrease <= cfg.ftol * scale {
            break;
        }
    }
    Some((u, fu))
}

/// `-H g` by the L-BFGS two-loop recursion.
fn two_loop(g: &[f64], pairs: &[(Vec<f64>, Vec<f64>, f64)]) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = vec![0.0; pairs.len()];
    for (k, (s, y, rho)) in pairs.iter().enumerate().rev() {
        let a = rho * dot(s, &q);
        alphas[k] = a;
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
    }
    if let Some((s, y, _)) = pairs.last() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), a) in pairs.iter().zip(&alphas) {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

/// Minimizes `objective` over `lower <= x <= upper` from `cfg.n_starts`
/// uniformly random starts drawn from `rng`.
pub fn minimize_box<F, R>(
    objective: F,
    lower: &[f64],
    upper: &[f64],
    cfg: &SolveConfig,
    rng: &mut R,
) -> Result<Minimum>
where
    F: Fn(&[f64]) -> f64 + Sync,
    R: Rng + ?Sized,
{
    cfg.validate()?;
    crate::space::SearchSpace::new(lower.to_vec(), upper.to_vec())?;
    let n = lower.len();
    let problem = Scaled {
        objective: &objective,
        lower,
        width: lower.iter().zip(upper).map(|(l, u)| u - l).collect(),
        evaluations: AtomicUsize::new(0),
    };
    let starts: Vec<Vec<f64>> = (0..cfg.n_starts)
        .map(|_| (0..n).map(|_| rng.gen::<f64>()).collect())
        .collect();

    #[cfg(feature = "parallel")]
    let results: Vec<Option<(Vec<f64>, f64)>> = {
        use rayon::prelude::*;
        starts
            .into_par_iter()
            .map(|s| descend(&problem, s, cfg))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Option<(Vec<f64>, f64)>> = starts
        .into_iter()
        .map(|s| descend(&problem, s, cfg))
        .collect();

    let found: Vec<(Vec<f64>, f64)> = results.into_iter().flatten().collect();
    let best = found.iter().map(|(_, f)| *f).fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Err(Error::NoMinimizerFound {
            starts: cfg.n_starts,
        });
    }
    let cutoff = best + cfg.tie_tolerance * (1.0 + best.abs());
    let ties: Vec<&(Vec<f64>, f64)> = found.iter().filter(|(_, f)| *f <= cutoff).collect();
    let (u, value) = ties[rng.gen_range(0..ties.len())];
    let mut point = Vec::with_capacity(n);
    problem.to_box(u, &mut point);
    for (x, (lo, hi)) in point.iter_mut().zip(lower.iter().zip(upper)) {
        *x = x.clamp(*lo, *hi);
    }
    Ok(Minimum {
        point,
        value: *value,
        evaluations: problem.evaluations.load(Ordering::Relaxed),
    })
}
