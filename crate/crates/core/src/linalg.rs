//! Small dense linear algebra on row-major `Vec<f64>` storage.
//!
//! Only what the RBF surrogate needs: symmetric eigendecomposition by cyclic
//! Jacobi rotations and the truncated pseudo-inverse built from it. For a
//! symmetric matrix the singular values are the absolute eigenvalues, so the
//! truncation is the usual SVD one.

use alloc::vec;
use alloc::vec::Vec;

/// Square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]

pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// `n x n` zero matrix.
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Wraps row-major data; panics if `data.len() != n * n`.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "row-major data must hold n*n entries");
        Self { n, data }
    }

    /// Order of the matrix.
    pub fn order(&self) -> usize {
        self.n
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Entry `(i, j)`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets entry `(i, j)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// `out = self * x`.
    pub fn mul_vec_into(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend((0..self.n).map(|i| dot(self.row(i), x)));
    }

    /// `self * x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n);
        self.mul_vec_into(x, &mut out);
        out
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// Dot product of equal-length slices.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Eigenvalues and orthonormal eigenvectors of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues, unsorted.
    pub values: Vec<f64>,
    /// Eigenvectors stored as columns of a row-major matrix.
    pub vectors: Matrix,
}

/// Cyclic Jacobi eigendecomposition of the symmetric matrix `a`.
///
/// Only the symmetric part of `a` is meaningful; the strictly lower triangle
/// is read as well, so callers should pass an exactly symmetric matrix.
pub fn symmetric_eigen(a: &Matrix) -> SymmetricEigen {
    let n = a.order();
    let mut m = a.clone();
    let mut v = Matrix::zeros(n);
    for i in 0..n {
        v.set(i, i, 1.0);
    }
    let scale: f64 = m.data.iter().map(|x| x * x).sum();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m.get(p, q) * m.get(p, q);
            }
        }
        if off <= 1e-32 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (m.get(q, q) - m.get(p, p)) / (2.0 * apq);
                let t = if theta.is_finite() {
                    let r = libm::sqrt(theta * theta + 1.0);
                    if theta >= 0.0 {
                        1.0 / (theta + r)
                    } else {
                        -1.0 / (-theta + r)
                    }
                } else {
                    0.0
                };
                if t == 0.0 {
                    continue;
                }
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (m.get(k, p), m.get(k, q));
                    m.set(k, p, c * akp - s * akq);
                    m.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let (apk, aqk) = (m.get(p, k), m.get(q, k));
                    m.set(p, k, c * apk - s * aqk);
                    m.set(q, k, s * apk + c * aqk);
                }
                m.set(p, q, 0.0);
                m.set(q, p, 0.0);
                for k in 0..n {
                    let (vkp, vkq) = (v.get(k, p), v.get(k, q));
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    SymmetricEigen {
        values: (0..n).map(|i| m.get(i, i)).collect(),
        vectors: v,
    }
}

/// Truncated pseudo-inverse of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct PseudoInverse {
    /// The (pseudo-)inverse, exactly symmetric.
    pub inverse: Matrix,
    /// Number of singular values below the threshold that were dropped.
    pub discarded: usize,
}

/// Pseudo-inverse of symmetric `a`, discarding singular values `< threshold`.
pub fn symmetric_pinv(a: &Matrix, threshold: f64) -> PseudoInverse {
    let n = a.order();
    let eig = symmetric_eigen(a);
    let mut inverse = Matrix::zeros(n);
    let mut discarded = 0;
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda.abs() < threshold {
            discarded += 1;
            continue;
        }
        let inv = 1.0 / lambda;
        for i in 0..n {
            let vik = eig.vectors.get(i, k) * inv;
            if vik == 0.0 {
                continue;
            }
            for j in i..n {
                let cur = inverse.get(i, j);
                inverse.set(i, j, cur + vik * eig.vectors.get(j, k));
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            let upper = inverse.get(j, i);
            inverse.set(i, j, upper);
        }
    }
    PseudoInverse { inverse, discarded }
}
