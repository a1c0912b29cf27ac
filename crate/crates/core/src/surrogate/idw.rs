use alloc::vec::Vec;

use super::{dot_values, raw_weights_into, IdwWeights, Surrogate};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Inverse distance weighting regressor; its state is just the dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct IdwModel {
    data: Dataset,
    delta: f64,
}

impl IdwModel {
    /// Wraps a nonempty dataset with the weight guard `delta > 0`.
    pub fn new(data: Dataset, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter("delta must be positive"));
        }
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Ok(Self { data, delta })
    }

    /// Underlying samples.
    pub fn data(&self) -> &Dataset {
        &self.data
    }

    /// Weight guard.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Raw and normalized weights at `x`.
    pub fn weights(&self, x: &[f64]) -> IdwWeights {
        Surrogate::Idw(self.clone()).idw_weights(x)
    }

    /// `fhat(x) = sum_i f_i v_i(x)`.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut w = Vec::with_capacity(self.data.len());
        let sum = raw_weights_into(
            self.data.points_flat(),
            self.data.dim(),
            x,
            self.delta,
            &mut w,
        );
        let inv = 1.0 / sum;
        w.iter_mut().for_each(|v| *v *= inv);
        dot_values(&w, self.data.values())
    }

    /// New model including `(x, f)`; IDW needs no refit beyond the append.
    pub fn partial_fit(&self, x: &[f64], f: f64) -> Result<Self> {
        Ok(Self {
            data: self.data.append(x, f)?,
            delta: self.delta,
        })
    }
}
