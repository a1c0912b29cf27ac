//! Myopic acquisition `Lambda`, its stochastic counterpart `Lambda^s` and the
//! Gauss-Hermite rule used for the expected variance.
//!
//! `Lambda(x) = fhat(x) - lambda * sigma(x) - mu * range(F) * zeta(x)`.
//! `Lambda^s` replaces `sigma(x)` by its expectation under the heuristic
//! posterior `N(fhat(x), sigma(x)^2)`.

use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use crate::dataset::value_range;
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::surrogate::{PointMoments, Surrogate};

/// Exploration weights `lambda` (variance) and `mu` (distance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcquisitionParams {
    /// Weight on the variance function.
    pub lambda: f64,
    /// Weight on the distance function, scaled by the observed range.
    pub mu: f64,
}

impl AcquisitionParams {
    /// Checks `lambda, mu >= 0`.
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        if !(lambda >= 0.0 && mu >= 0.0 && lambda.is_finite() && mu.is_finite()) {
            return Err(Error::InvalidParameter("lambda and mu must be nonnegative"));
        }
        Ok(Self { lambda, mu })
    }

    /// `lambda = 1/n`, `mu = 0.5/n`.
    pub fn scaled_for_dim(dim: usize) -> Self {
        let n = dim as f64;
        Self {
            lambda: 1.0 / n,
            mu: 0.5 / n,
        }
    }
}

/// Gauss-Hermite nodes and probability weights for expectations under a
/// standard normal after the substitution `y = sqrt(2) * node`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermiteRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Orthonormalized Hermite values `(h_{n-1}(x), h_n(x))`, where
/// `h_n = H_n / sqrt(2^n n!)`.
fn hermite_pair(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for j in 0..n {
        let next = libm::sqrt(2.0 / (j as f64 + 1.0)) * x * cur
            - libm::sqrt(j as f64 / (j as f64 + 1.0)) * prev;
        prev = cur;
        cur = next;
    }
    (prev, cur)
}

impl GaussHermiteRule {
    /// Largest supported order.
    pub const MAX_ORDER: usize = 64;

    /// Rule with `order` nodes, the roots of the physicists' `H_order`.
    ///
    /// Nodes start from the eigenvalues of the Jacobi matrix and are polished
    /// by Newton steps; the weights
    /// `2^(q-1) q! sqrt(pi) / (q^2 H_{q-1}(x_j)^2)` are divided by `sqrt(pi)`
    /// so that they sum to one.
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 || order > Self::MAX_ORDER {
            return Err(Error::InvalidParameter(
                "Gauss-Hermite order must be in 1..=64",
            ));
        }
        let mut jacobi = Matrix::zeros(order);
        for i in 1..order {
            let b = libm::sqrt(i as f64 / 2.0);
            jacobi.set(i - 1, i, b);
            jacobi.set(i, i - 1, b);
        }
        let mut nodes = symmetric_eigen(&jacobi).values;
        let q = order as f64;
        for x in nodes.iter_mut() {
            for _ in 0..8 {
                let (hm1, h) = hermite_pair(order, *x);
                let step = h / (libm::sqrt(2.0 * q) * hm1);
                if !step.is_finite() {
                    break;
                }
                *x -= step;
                if step.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
        }
        nodes.sort_by(|a, b| a.total_cmp(b));
        // enforce exact symmetry about zero
        for i in 0..order / 2 {
            let j = order - 1 - i;
            let r = 0.5 * (nodes[j] - nodes[i]);
            nodes[i] = -r;
            nodes[j] = r;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        let weights = nodes
            .iter()
            .map(|&x| {
                let (hm1, _) = hermite_pair(order, x);
                1.0 / (q * hm1 * hm1)
            })
            .collect();
        Ok(Self { nodes, weights })
    }

    /// Number of nodes.
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Roots of `H_q`, ascending.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Probability weights (sum to one).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weights for the `exp(-x^2)` measure, i.e. before dividing by `sqrt(pi)`.
    pub fn raw_weights(&self) -> Vec<f64> {
        let s = libm::sqrt(PI);
        self.weights.iter().map(|w| w * s).collect()
    }

    /// Standard-normal abscissae `sqrt(2) * node`.
    pub fn normal_points(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().map(|x| SQRT_2 * x)
    }

    /// `E[g(Y)]` for `Y ~ N(0, 1)`.
    pub fn expect<F: FnMut(f64) -> f64>(&self, mut g: F) -> f64 {
        self.normal_points()
            .zip(&self.weights)
            .map(|(y, w)| w * g(y))
            .sum()
    }
}

/// `E[sigma]` from the moments at a point: with `z_j = fhat + sqrt(2) sigma x_j`,
/// `sum_i v_i (z_j - f_i)^2 = spread + 2 d_j bias + d_j^2` for `d_j = z_j - fhat`.
pub(crate) fn expected_sigma(m: &PointMoments, rule: &GaussHermiteRule) -> f64 {
    let sigma = m.sigma();
    let mut acc = 0.0;
    for (y, w) in rule.normal_points().zip(&rule.weights) {
        let d = sigma * y;
        let inner = m.spread + 2.0 * d * m.bias + d * d;
        acc += w * libm::sqrt(inner.max(0.0));
    }
    acc
}

#[inline]
pub(crate) fn combine(
    params: &AcquisitionParams,
    prediction: f64,
    uncertainty: f64,
    range: f64,
    distance: f64,
) -> f64 {
    prediction - params.lambda * uncertainty - params.mu * range * distance
}

fn observed_range(model: &Surrogate) -> f64 {
    value_range(model.data().values()).map_or(0.0, |(lo, hi)| hi - lo)
}

/// Gauss-Hermite estimate of `E[sigma(x)]` under the heuristic posterior.
pub fn expected_variance(model: &Surrogate, x: &[f64], rule: &GaussHermiteRule) -> f64 {
    expected_sigma(&model.moments(x, &mut Vec::new()), rule)
}

/// `Lambda(D_k, x)`.
pub fn myopic_acquisition(model: &Surrogate, params: &AcquisitionParams, x: &[f64]) -> f64 {
    let m = model.moments(x, &mut Vec::new());
    combine(
        params,
        m.prediction,
        m.sigma(),
        observed_range(model),
        m.distance(),
    )
}

/// `Lambda^s(D_k, x)`, the negated stage reward.
pub fn stochastic_acquisition(
    model: &Surrogate,
    params: &AcquisitionParams,
    x: &[f64],
    rule: &GaussHermiteRule,
) -> f64 {
    let m = model.moments(x, &mut Vec::new());
    combine(
        params,
        m.prediction,
        expected_sigma(&m, rule),
        observed_range(model),
        m.distance(),
    )
}
