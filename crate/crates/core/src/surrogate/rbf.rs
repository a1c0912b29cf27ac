use alloc::vec::Vec;

use crate::dataset::{sq_dist, Dataset};
use crate::error::{Error, Result};
use crate::linalg::{dot, symmetric_pinv, Matrix};

/// Radial basis function `phi(eps * d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `phi(y) = 1 / (1 + y^2)`.
    InverseQuadratic {
        /// Shape parameter `eps > 0`.
        eps: f64,
    },
}

impl Kernel {
    /// Kernel value for squared distance `d2`.
    #[inline]
    pub fn eval_sq(&self, d2: f64) -> f64 {
        match *self {
            Kernel::InverseQuadratic { eps } => 1.0 / (1.0 + eps * eps * d2),
        }
    }

    /// `phi(y)` at scaled radius `y = eps * d`.
    pub fn phi(&self, y: f64) -> f64 {
        match *self {
            Kernel::InverseQuadratic { .. } => 1.0 / (1.0 + y * y),
        }
    }

    /// Shape parameter.
    pub fn eps(&self) -> f64 {
        match *self {
            Kernel::InverseQuadratic { eps } => eps,
        }
    }
}

/// How the last coefficient update was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateKind {
    /// Full pseudo-inverse of the interpolation matrix.
    Batch,
    /// Blockwise inverse with a nonsingular Schur complement.
    Blockwise,
    /// Blockwise update refused (tiny Schur complement or a truncated
    /// current inverse); the full system was solved instead.
    Fallback,
}

/// Settings of an RBF fit.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfConfig {
    /// Kernel shape parameter.
    pub eps: f64,
    /// Singular values below this are discarded.
    pub svd_threshold: f64,
    /// `|c|` below this forces a full refit.
    pub schur_tol: f64,
    /// IDW guard used by the variance and distance functions.
    pub delta: f64,
}

impl RbfConfig {
    /// Config with the given shape parameter and default tolerances.
    pub fn with_eps(eps: f64) -> Self {
        Self {
            eps,
            svd_threshold: 1e-8,
            schur_tol: 1e-8,
            delta: 1e-12,
        }
    }
}

/// RBF interpolant: dataset, coefficients `B_k` and `M_k^{-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfState {
    data: Dataset,
    kernel: Kernel,
    config: RbfConfig,
    coeffs: Vec<f64>,
    inverse: Matrix,
    discarded: usize,
    last_update: UpdateKind,
}

/// `M_k` for row-major `points`.
pub(crate) fn interpolation_matrix(points: &[f64], dim: usize, kernel: &Kernel) -> Matrix {
    let k = points.len() / dim;
    let mut m = Matrix::zeros(k);
    for i in 0..k {
        let pi = &points[i * dim..(i + 1) * dim];
        m.set(i, i, kernel.eval_sq(0.0));
        for j in i + 1..k {
            let v = kernel.eval_sq(sq_dist(pi, &points[j * dim..(j + 1) * dim]));
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    m
}

/// Writes `Phi_k(x)` into `out`.
pub(crate) fn kernel_column_into(
    points: &[f64],
    dim: usize,
    x: &[f64],
    kernel: &Kernel,
    out: &mut Vec<f64>,
) {
    out.clear();
    out.extend(
        points
            .chunks_exact(dim)
            .map(|p| kernel.eval_sq(sq_dist(p, x))),
    );
}

/// Result of extending `M_k^{-1}` by one row and column.
pub(crate) struct BlockwiseStep {
    /// `L = M_k^{-1} Phi_k(x)`.
    pub l: Vec<f64>,
    /// Schur complement `c = phi(0) - Phi_k(x)^T L`.
    pub c: f64,
}

/// Computes `L` and `c` for a new point with kernel column `phi_col`;
/// `None` when `|c| < schur_tol`.
pub(crate) fn blockwise_extend(
    inverse: &Matrix,
    phi_col: &[f64],
    phi0: f64,
    schur_tol: f64,
) -> Option<BlockwiseStep> {
    let l = inverse.mul_vec(phi_col);
    let c = phi0 - dot(phi_col, &l);
    if !(c.abs() >= schur_tol) {
        return None;
    }
    Some(BlockwiseStep { l, c })
}

impl BlockwiseStep {
    /// Assembles `M_{k+1}^{-1} = 1/c [[c M^{-1} + L L^T, -L], [-L^T, 1]]`.
    pub(crate) fn assemble(&self, inverse: &Matrix) -> Matrix {
        let k = inverse.order();
        let mut out = Matrix::zeros(k + 1);
        let inv_c = 1.0 / self.c;
        for i in 0..k {
            for j in i..k {
                let v = inverse.get(i, j) + self.l[i] * self.l[j] * inv_c;
                out.set(i, j, v);
                out.set(j, i, v);
            }
            out.set(i, k, -self.l[i] * inv_c);
            out.set(k, i, -self.l[i] * inv_c);
        }
        out.set(k, k, inv_c);
        out
    }
}

impl RbfState {
    /// Fits on `data` with shape `eps` and singular value cut `svd_threshold`
    /// (other tolerances at their defaults).
    pub fn fit(data: Dataset, eps: f64, svd_threshold: f64) -> Result<Self> {
        Self::fit_with(
            data,
            &RbfConfig {
                svd_threshold,
                ..RbfConfig::with_eps(eps)
            },
        )
    }

    /// Fits on `data` by truncated pseudo-inverse of `M_k`.
    pub fn fit_with(data: Dataset, config: &RbfConfig) -> Result<Self> {
        if !(config.eps > 0.0 && config.eps.is_finite()) {
            return Err(Error::InvalidParameter("eps must be positive"));
        }
        if !(config.delta > 0.0) || !(config.svd_threshold >= 0.0) || !(config.schur_tol >= 0.0) {
            return Err(Error::InvalidParameter(
                "RBF tolerances must be nonnegative",
            ));
        }
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let kernel = Kernel::InverseQuadratic { eps: config.eps };
        let m = interpolation_matrix(data.points_flat(), data.dim(), &kernel);
        let pinv = symmetric_pinv(&m, config.svd_threshold);
        let coeffs = pinv.inverse.mul_vec(data.values());
        Ok(Self {
            data,
            kernel,
            config: config.clone(),
            coeffs,
            inverse: pinv.inverse,
            discarded: pinv.discarded,
            last_update: UpdateKind::Batch,
        })
    }

    /// Restores a state from its stored parts, checking shapes only.
    pub fn from_parts(
        data: Dataset,
        config: &RbfConfig,
        coeffs: Vec<f64>,
        inverse: Matrix,
        discarded: usize,
    ) -> Result<Self> {
        let k = data.len();
        if coeffs.len() != k || inverse.order() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: if coeffs.len() != k {
                    coeffs.len()
                } else {
                    inverse.order()
                },
            });
        }
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Ok(Self {
            data,
            kernel: Kernel::InverseQuadratic { eps: config.eps },
            config: config.clone(),
            coeffs,
            inverse,
            discarded,
            last_update: UpdateKind::Batch,
        })
    }

    /// Underlying samples.
    pub fn data(&self) -> &Dataset {
        &self.data
    }

    /// Kernel in use.
    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    /// Fit settings.
    pub fn config(&self) -> &RbfConfig {
        &self.config
    }

    /// Shape parameter.
    pub fn eps(&self) -> f64 {
        self.config.eps
    }

    /// IDW guard used for the uncertainty functions.
    pub fn delta(&self) -> f64 {
        self.config.delta
    }

    /// Singular value threshold.
    pub fn svd_threshold(&self) -> f64 {
        self.config.svd_threshold
    }

    /// Coefficients `B_k`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `M_k^{-1}` (a pseudo-inverse if singular values were discarded).
    pub fn inverse(&self) -> &Matrix {
        &self.inverse
    }

    /// Singular values dropped by the most recent full solve still in effect.
    pub fn discarded(&self) -> usize {
        self.discarded
    }

    /// Whether `inverse()` is an exact inverse.
    pub fn is_exact_inverse(&self) -> bool {
        self.discarded == 0
    }

    /// How the current coefficients were produced.
    pub fn last_update(&self) -> UpdateKind {
        self.last_update
    }

    /// The interpolation matrix `M_k`.
    pub fn interpolation_matrix(&self) -> Matrix {
        interpolation_matrix(self.data.points_flat(), self.data.dim(), &self.kernel)
    }

    /// `Phi_k(x)`.
    pub fn kernel_column(&self, x: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.data.len());
        kernel_column_into(
            self.data.points_flat(),
            self.data.dim(),
            x,
            &self.kernel,
            &mut out,
        );
        out
    }

    /// `fhat(x) = B_k . Phi_k(x)`.
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.data
            .points()
            .zip(&self.coeffs)
            .map(|(p, b)| b * self.kernel.eval_sq(sq_dist(p, x)))
            .sum()
    }

    /// `max |M_k B_k - F_k|`.
    pub fn residual(&self) -> f64 {
        self.interpolation_matrix()
            .mul_vec(&self.coeffs)
            .iter()
            .zip(self.data.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// New state with `(x, f)` appended, via the blockwise inverse when the
    /// Schur complement allows it and a full refit otherwise.
    pub fn partial_fit(&self, x: &[f64], f: f64) -> Result<Self> {
        let data = self.data.append(x, f)?;
        if self.discarded > 0 {
            return self.refit(data);
        }
        let phi = self.kernel_column(x);
        match blockwise_extend(
            &self.inverse,
            &phi,
            self.kernel.eval_sq(0.0),
            self.config.schur_tol,
        ) {
            Some(step) => {
                let inverse = step.assemble(&self.inverse);
                let coeffs = inverse.mul_vec(data.values());
                Ok(Self {
                    data,
                    kernel: self.kernel,
                    config: self.config.clone(),
                    coeffs,
                    inverse,
                    discarded: 0,
                    last_update: UpdateKind::Blockwise,
                })
            }
            None => self.refit(data),
        }
    }

    fn refit(&self, data: Dataset) -> Result<Self> {
        let mut next = Self::fit_with(data, &self.config)?;
        next.last_update = UpdateKind::Fallback;
        Ok(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SearchSpace;
    use alloc::vec;

    #[test]
    fn kernel_shape() {
        let k = Kernel::InverseQuadratic { eps: 0.5 };
        assert_eq!(k.phi(0.0), 1.0);
        let mut prev = 1.0;
        for i in 1..50 {
            let v = k.phi(i as f64 * 0.2);
            assert!(v > 0.0 && v < prev);
            prev = v;
        }
        assert_eq!(k.eval_sq(4.0), k.phi(1.0));
    }

    #[test]
    fn single_point_fit() {
        let data = Dataset::from_pairs(SearchSpace::unit(1).unwrap(), [(&[0.4][..], 2.5)]).unwrap();
        let s = RbfState::fit(data, 1.0, 1e-8).unwrap();
        assert_eq!(s.interpolation_matrix().as_slice(), &[1.0]);
        assert_eq!(s.coeffs(), &[2.5]);
        assert_eq!(s.predict(&[0.4]), 2.5);
    }

    #[test]
    fn prediction_decays_far_away() {
        let space = SearchSpace::new(vec![-1e6], vec![1e6]).unwrap();
        let data = Dataset::from_pairs(space, [(&[0.0][..], 3.0)]).unwrap();
        let s = RbfState::fit(data, 1.0, 1e-8).unwrap();
        assert!(s.predict(&[1e5]).abs() < 1e-9);
    }

    #[test]
    fn symmetric_pair_has_equal_coefficients() {
        let space = SearchSpace::new(vec![-1.0], vec![1.0]).unwrap();
        let data = Dataset::from_pairs(space, [(&[-1.0][..], 0.7), (&[1.0][..], 0.7)]).unwrap();
        let s = RbfState::fit(data, 1.0, 1e-8).unwrap();
        assert!((s.coeffs()[0] - s.coeffs()[1]).abs() < 1e-15);
    }

    #[test]
    fn two_by_two_blockwise_hand_values() {
        // eps * d = 1  =>  phi = 1/2, L = [1/2], c = 3/4
        let space = SearchSpace::new(vec![0.0], vec![4.0]).unwrap();
        let data = Dataset::from_pairs(space, [(&[0.0][..], 1.0)]).unwrap();
        let s = RbfState::fit(data, 0.5, 1e-8).unwrap();
        let phi = s.kernel_column(&[2.0]);
        assert_eq!(phi, vec![0.5]);
        let step = blockwise_extend(s.inverse(), &phi, 1.0, 1e-8).unwrap();
        assert_eq!(step.l, vec![0.5]);
        assert_eq!(step.c, 0.75);
        let next = s.partial_fit(&[2.0], 3.0).unwrap();
        assert_eq!(next.last_update(), UpdateKind::Blockwise);
        // [[1, 1/2], [1/2, 1]]^{-1} = 4/3 [[1, -1/2], [-1/2, 1]]
        let want = [4.0 / 3.0, -2.0 / 3.0, -2.0 / 3.0, 4.0 / 3.0];
        for (a, b) in next.inverse().as_slice().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(next.residual() < 1e-14);
    }

    #[test]
    fn near_duplicate_column_falls_back() {
        let space = SearchSpace::unit(1).unwrap();
        let data = Dataset::from_pairs(space, [(&[0.2][..], 1.0), (&[0.8][..], 2.0)]).unwrap();
        let s = RbfState::fit(data, 1.0, 1e-8).unwrap();
        // squared distance 1e-12 passes the duplicate check but c ~ 1e-12
        let next = s.partial_fit(&[0.2 + 1e-6], 1.5).unwrap();
        assert_eq!(next.last_update(), UpdateKind::Fallback);
        assert!(next.discarded() >= 1);
        // truncated inverse stays on the full-solve path
        let after = next.partial_fit(&[0.5], 0.0).unwrap();
        assert_eq!(after.last_update(), UpdateKind::Fallback);
    }

    #[test]
    fn inverse_is_symmetric() {
        let space = SearchSpace::new(vec![-3.0, -3.0], vec![3.0, 3.0]).unwrap();
        let pts = [
            [-2.0, 1.0],
            [0.5, 0.5],
            [2.5, -1.0],
            [1.0, 2.9],
            [-0.7, -2.2],
        ];
        let vals = [1.0, -0.5, 2.0, 0.3, 0.9];
        let data = Dataset::from_pairs(space, pts.iter().map(|p| &p[..]).zip(vals.iter().copied()))
            .unwrap();
        let s = RbfState::fit(data, 0.5, 1e-8).unwrap();
        assert!(s.inverse().asymmetry() <= 1e-10);
        let s2 = s.partial_fit(&[0.0, -1.0], 4.0).unwrap();
        assert!(s2.inverse().asymmetry() <= 1e-10);
    }
}
