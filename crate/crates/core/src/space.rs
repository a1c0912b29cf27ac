//! Hyperrectangular search spaces.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Axis-aligned box `lower <= x <= upper` in `R^n`.
#[derive(Debug, Clone, PartialEq)]

pub struct SearchSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchSpace {
    /// Builds a box, checking `lower[i] < upper[i]` for every coordinate.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::EmptySpace);
        }
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for (index, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidBounds {
                    index,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        Ok(Self { lower, upper })
    }

    /// The unit hypercube `[0, 1]^dim`.
    pub fn unit(dim: usize) -> Result<Self> {
        Self::new(alloc::vec![0.0; dim], alloc::vec![1.0; dim])
    }

    /// Number of coordinates.
    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Lower bounds.
    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    /// Upper bounds.
    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Whether `x` has the right length and lies in the closed box.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| v >= lo && v <= hi)
    }

    /// Returns `Ok(())` if `x` lies in the box, else the matching error.
    pub fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutOfBounds)
        }
    }

    /// Midpoint of the box.
    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| 0.5 * (lo + hi))
            .collect()
    }

    /// Projects `x` onto the box in place.
    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (&lo, &hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(lo, hi);
        }
    }

    /// The box repeated `times` times, for stacked decision vectors.
    pub fn repeat(&self, times: usize) -> Self {
        let mut lower = Vec::with_capacity(self.dim() * times);
        let mut upper = Vec::with_capacity(self.dim() * times);
        for _ in 0..times {
            lower.extend_from_slice(&self.lower);
            upper.extend_from_slice(&self.upper);
        }
        Self { lower, upper }
    }
}
