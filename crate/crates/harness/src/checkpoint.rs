//! JSON checkpoints of fitted RBF states: the dataset, coefficients and the
//! (pseudo-)inverse as row-major arrays.

use std::fs;
use std::path::Path;

use nmgo_core::linalg::Matrix;
use nmgo_core::{Dataset, RbfConfig, RbfState, SearchSpace};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbfCheckpoint {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub eps: f64,
    pub svd_threshold: f64,
    pub schur_tol: f64,
    pub delta: f64,
    pub coeffs: Vec<f64>,
    /// Order of `inverse`.
    pub order: usize,
    /// Row-major `M^{-1}`.
    pub inverse: Vec<f64>,
    pub discarded: usize,
}

impl RbfCheckpoint {
    pub fn from_state(state: &RbfState) -> Self {
        let data = state.data();
        let cfg = state.config();
        Self {
            lower: data.space().lower().to_vec(),
            upper: data.space().upper().to_vec(),
            points: data.points().map(<[f64]>::to_vec).collect(),
            values: data.values().to_vec(),
            eps: cfg.eps,
            svd_threshold: cfg.svd_threshold,
            schur_tol: cfg.schur_tol,
            delta: cfg.delta,
            coeffs: state.coeffs().to_vec(),
            order: state.inverse().order(),
            inverse: state.inverse().as_slice().to_vec(),
            discarded: state.discarded(),
        }
    }

    pub fn restore(&self) -> anyhow::Result<RbfState> {
        let space = SearchSpace::new(self.lower.clone(), self.upper.clone())?;
        anyhow::ensure!(
            self.points.len() == self.values.len(),
            "points and values differ in length"
        );
        anyhow::ensure!(
            self.inverse.len() == self.order * self.order,
            "inverse is not square"
        );
        let data = Dataset::from_pairs(
            space,
            self.points
                .iter()
                .map(Vec::as_slice)
                .zip(self.values.iter().copied()),
        )?;
        let config = RbfConfig {
            eps: self.eps,
            svd_threshold: self.svd_threshold,
            schur_tol: self.schur_tol,
            delta: self.delta,
        };
        let inverse = Matrix::from_row_major(self.order, self.inverse.clone());
        Ok(RbfState::from_parts(
            data,
            &config,
            self.coeffs.clone(),
            inverse,
            self.discarded,
        )?)
    }

    pub fn save(&self, path: &Path) -> anyhow::Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}
