//! Surrogate models: inverse distance weighting and radial basis functions.
//!
//! Both models share the IDW weights `w_i(x) = 1 / max(d^2(x, x_i), delta)`.
//! They drive the variance function `sigma(x)` and the distance function
//! `zeta(x)` regardless of which model produces the prediction.

mod idw;
mod rbf;

use alloc::vec::Vec;
use core::f64::consts::FRAC_2_PI;

pub use idw::IdwModel;
pub(crate) use rbf::{blockwise_extend, interpolation_matrix, kernel_column_into};
pub use rbf::{Kernel, RbfConfig, RbfState, UpdateKind};

use crate::dataset::{sq_dist, Dataset};
use crate::error::Result;

/// Which regression model backs a [`Surrogate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SurrogateKind {
    /// Inverse distance weighting.
    Idw,
    /// Inverse-quadratic radial basis functions.
    Rbf,
}

/// Raw and normalized IDW weights at a query point.
#[derive(Debug, Clone, PartialEq)]
pub struct IdwWeights {
    /// `w_i = 1 / max(d^2, delta)`.
    pub raw: Vec<f64>,
    /// `v_i = w_i / sum(w)`.
    pub normalized: Vec<f64>,
    /// `sum(w)`.
    pub sum: f64,
}

/// Writes the raw IDW weights of `x` against row-major `points` into `out`
/// and returns their sum.
pub(crate) fn raw_weights_into(
    points: &[f64],
    dim: usize,
    x: &[f64],
    delta: f64,
    out: &mut Vec<f64>,
) -> f64 {
    out.clear();
    let mut sum = 0.0;
    for p in points.chunks_exact(dim) {
        let w = 1.0 / sq_dist(p, x).max(delta);
        sum += w;
        out.push(w);
    }
    sum
}

/// `zeta = (2/pi) atan(1 / sum(w))`.
#[inline]
pub(crate) fn distance_from_weight_sum(sum: f64) -> f64 {
    FRAC_2_PI * libm::atan(1.0 / sum)
}

/// Quantities of a surrogate at one query point, in the form the
/// acquisition functions consume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PointMoments {
    pub prediction: f64,
    /// `sum_i v_i (fhat - f_i)^2`, i.e. `sigma^2`.
    pub spread: f64,
    /// `sum_i v_i (fhat - f_i)`; zero up to roundoff for IDW.
    pub bias: f64,
    /// `sum_i w_i`.
    pub weight_sum: f64,
}

impl PointMoments {
    /// `sigma(x)`.
    pub fn sigma(&self) -> f64 {
        libm::sqrt(self.spread)
    }

    /// `zeta(x)`.
    pub fn distance(&self) -> f64 {
        distance_from_weight_sum(self.weight_sum)
    }
}

/// Given raw weights (normalized in place), observed values and a
/// prediction, returns the moment summary.
pub(crate) fn moments_from_weights(
    weights: &mut [f64],
    weight_sum: f64,
    values: &[f64],
    prediction: impl FnOnce(&[f64]) -> f64,
) -> PointMoments {
    let inv = 1.0 / weight_sum;
    weights.iter_mut().for_each(|w| *w *= inv);
    let prediction = prediction(weights);
    let mut spread = 0.0;
    let mut bias = 0.0;
    for (v, f) in weights.iter().zip(values) {
        let r = prediction - f;
        bias += v * r;
        spread += v * r * r;
    }
    PointMoments {
        prediction,
        spread: spread.max(0.0),
        bias,
        weight_sum,
    }
}

/// A fitted IDW or RBF surrogate.
#[derive(Debug, Clone, PartialEq)]
pub enum Surrogate {
    /// Non-parametric inverse distance weighting.
    Idw(IdwModel),
    /// Parametric radial basis function interpolant.
    Rbf(RbfState),
}

impl Surrogate {
    /// Fits a model of `kind` on `data`; `eps` and `svd_threshold` are only
    /// used by RBF.
    pub fn fit(kind: SurrogateKind, data: Dataset, delta: f64, rbf: &RbfConfig) -> Result<Self> {
        match kind {
            SurrogateKind::Idw => IdwModel::new(data, delta).map(Surrogate::Idw),
            SurrogateKind::Rbf => RbfState::fit_with(
                data,
                &RbfConfig {
                    delta,
                    ..rbf.clone()
                },
            )
            .map(Surrogate::Rbf),
        }
    }

    /// Which model this is.
    pub fn kind(&self) -> SurrogateKind {
        match self {
            Surrogate::Idw(_) => SurrogateKind::Idw,
            Surrogate::Rbf(_) => SurrogateKind::Rbf,
        }
    }

    /// The dataset the model was fitted on.
    pub fn data(&self) -> &Dataset {
        match self {
            Surrogate::Idw(m) => m.data(),
            Surrogate::Rbf(m) => m.data(),
        }
    }

    /// IDW guard `delta`.
    pub fn delta(&self) -> f64 {
        match self {
            Surrogate::Idw(m) => m.delta(),
            Surrogate::Rbf(m) => m.delta(),
        }
    }

    /// IDW weights at `x`.
    pub fn idw_weights(&self, x: &[f64]) -> IdwWeights {
        let data = self.data();
        let mut raw = Vec::with_capacity(data.len());
        let sum = raw_weights_into(data.points_flat(), data.dim(), x, self.delta(), &mut raw);
        let normalized = raw.iter().map(|w| w / sum).collect();
        IdwWeights {
            raw,
            normalized,
            sum,
        }
    }

    /// Surrogate prediction `fhat(x)`.
    pub fn predict(&self, x: &[f64]) -> f64 {
        match self {
            Surrogate::Idw(m) => m.predict(x),
            Surrogate::Rbf(m) => m.predict(x),
        }
    }

    /// Variance function `sigma(x)`: the IDW-weighted RMS deviation of the
    /// model's own prediction from the observations.
    pub fn variance(&self, x: &[f64]) -> f64 {
        self.moments(x, &mut Vec::new()).sigma()
    }

    /// Distance function `zeta(x)` in `[0, 1)`.
    pub fn distance(&self, x: &[f64]) -> f64 {
        let data = self.data();
        let mut buf = Vec::with_capacity(data.len());
        distance_from_weight_sum(raw_weights_into(
            data.points_flat(),
            data.dim(),
            x,
            self.delta(),
            &mut buf,
        ))
    }

    /// Returns the model refitted on the dataset extended by `(x, f)`.
    pub fn partial_fit(&self, x: &[f64], f: f64) -> Result<Self> {
        match self {
            Surrogate::Idw(m) => m.partial_fit(x, f).map(Surrogate::Idw),
            Surrogate::Rbf(m) => m.partial_fit(x, f).map(Surrogate::Rbf),
        }
    }

    pub(crate) fn moments(&self, x: &[f64], scratch: &mut Vec<f64>) -> PointMoments {
        let data = self.data();
        let sum = raw_weights_into(data.points_flat(), data.dim(), x, self.delta(), scratch);
        match self {
            Surrogate::Idw(_) => moments_from_weights(scratch, sum, data.values(), |v| {
                dot_values(v, data.values())
            }),
            Surrogate::Rbf(m) => {
                let pred = m.predict(x);
                moments_from_weights(scratch, sum, data.values(), |_| pred)
            }
        }
    }
}

#[inline]
pub(crate) fn dot_values(v: &[f64], values: &[f64]) -> f64 {
    v.iter().zip(values).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SearchSpace;
    use alloc::vec;

    fn pair_1d() -> Dataset {
        Dataset::from_pairs(
            SearchSpace::unit(1).unwrap(),
            [(&[0.0][..], 0.0), (&[1.0][..], 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn variance_and_distance_hand_values() {
        let m = Surrogate::Idw(IdwModel::new(pair_1d(), 1e-12).unwrap());
        let w = m.idw_weights(&[0.5]);
        assert_eq!(w.raw, vec![4.0, 4.0]);
        assert_eq!(w.normalized, vec![0.5, 0.5]);
        assert!((m.variance(&[0.5]) - 0.5).abs() < 1e-15);
        let zeta = m.distance(&[0.5]);
        assert!((zeta - FRAC_2_PI * libm::atan(0.125)).abs() < 1e-15);
        assert!((zeta - 0.079_166_85).abs() < 1e-8);
    }

    #[test]
    fn vanishing_uncertainty_at_samples() {
        let data = Dataset::from_pairs(
            SearchSpace::unit(1).unwrap(),
            [(&[0.0][..], -2.0), (&[0.3][..], 5.0), (&[1.0][..], 1.0)],
        )
        .unwrap();
        let range = 7.0;
        for model in [
            Surrogate::Idw(IdwModel::new(data.clone(), 1e-12).unwrap()),
            Surrogate::Rbf(RbfState::fit(data.clone(), 1.0, 1e-8).unwrap()),
        ] {
            for x in data.points() {
                assert!(model.variance(x) <= 1e-5 * range);
                let zeta = model.distance(x);
                assert!(zeta <= 1e-10);
                assert!((zeta - FRAC_2_PI * libm::atan(1e-12)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn constant_data_has_zero_idw_variance() {
        let data = Dataset::from_pairs(
            SearchSpace::unit(2).unwrap(),
            [
                (&[0.1, 0.2][..], 3.0),
                (&[0.7, 0.9][..], 3.0),
                (&[0.5, 0.1][..], 3.0),
            ],
        )
        .unwrap();
        let m = Surrogate::Idw(IdwModel::new(data, 1e-12).unwrap());
        for x in [[0.3, 0.3], [0.9, 0.0], [0.0, 1.0]] {
            assert_eq!(m.variance(&x), 0.0);
        }
    }

    #[test]
    fn distance_tends_to_one_far_away() {
        let data = Dataset::from_pairs(
            SearchSpace::new(vec![-1e9], vec![1e9]).unwrap(),
            [(&[0.0][..], 1.0)],
        )
        .unwrap();
        let m = Surrogate::Idw(IdwModel::new(data, 1e-12).unwrap());
        let zeta = m.distance(&[1e4]);
        assert!(zeta > 1.0 - 1e-7 && zeta < 1.0);
    }
}
