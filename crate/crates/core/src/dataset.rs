//! Query/observation datasets, the random warm-up design and the incumbent.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::space::SearchSpace;

/// Minimum squared distance between two stored samples.
///
/// IDW weights saturate at `1/delta` with `delta = 1e-12`, so points closer
/// than this would be indistinguishable to the surrogate.
pub const DUP_TOL: f64 = 1e-14;

/// Ordered list of pairwise-distinct samples `(x_i, f_i)` inside a box.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    space: SearchSpace,
    // row-major, len = size * dim
    points: Vec<f64>,
    values: Vec<f64>,
}

impl Dataset {
    /// Empty dataset over `space`.
    pub fn new(space: SearchSpace) -> Self {
        Self {
            space,
            points: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds a dataset by appending every pair in order.
    pub fn from_pairs<'a, I>(space: SearchSpace, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [f64], f64)>,
    {
        let mut data = Self::new(space);
        for (x, f) in pairs {
            data.push(x, f)?;
        }
        Ok(data)
    }

    /// The search space the samples live in.
    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    /// Number of coordinates per point.
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Number of samples `k`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Whether no sample has been stored yet.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Row-major matrix of points, `len() * dim()` entries.
    pub fn points_flat(&self) -> &[f64] {
        &self.points
    }

    /// Observed values `F_k`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The `i`-th point.
    pub fn point(&self, i: usize) -> &[f64] {
        let n = self.dim();
        &self.points[i * n..(i + 1) * n]
    }

    /// Iterator over points in insertion order.
    pub fn points(&self) -> core::slice::ChunksExact<'_, f64> {
        self.points.chunks_exact(self.dim())
    }

    /// Index and squared distance of the stored point nearest to `x`.
    pub fn nearest(&self, x: &[f64]) -> Option<(usize, f64)> {
        self.points()
            .map(|p| sq_dist(p, x))
            .enumerate()
            .fold(None, |best, (i, d2)| match best {
                Some((_, bd)) if bd <= d2 => best,
                _ => Some((i, d2)),
            })
    }

    /// Appends `(x, f)` in place after the bounds and duplicate checks.
    pub fn push(&mut self, x: &[f64], f: f64) -> Result<()> {
        self.space.check(x)?;
        if let Some((index, dist2)) = self.nearest(x) {
            if dist2 <= DUP_TOL {
                return Err(Error::DuplicatePoint { index, dist2 });
            }
        }
        self.points.extend_from_slice(x);
        self.values.push(f);
        Ok(())
    }

    /// Returns a new dataset equal to `self` with `(x, f)` appended.
    pub fn append(&self, x: &[f64], f: f64) -> Result<Self> {
        let mut next = self.clone();
        next.push(x, f)?;
        Ok(next)
    }

    /// Minimum and maximum observed value.
    pub fn value_range(&self) -> Option<(f64, f64)> {
        value_range(&self.values)
    }

    /// The sample with the smallest observed value, lowest index on ties.
    pub fn incumbent(&self) -> Result<(&[f64], f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &f) in self.values.iter().enumerate() {
            if best.is_none_or(|(_, b)| f < b) {
                best = Some((i, f));
            }
        }
        best.map(|(i, f)| (self.point(i), f))
            .ok_or(Error::EmptyDataset)
    }
}

/// Squared Euclidean distance.
#[inline]
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn value_range(values: &[f64]) -> Option<(f64, f64)> {
    let first = *values.first()?;
    Some(
        values
            .iter()
            .fold((first, first), |(lo, hi), &v| (lo.min(v), hi.max(v))),
    )
}

/// Draws `count` i.i.d. uniform points in `space`, redrawing any point that
/// collides with an earlier one (within [`DUP_TOL`]).
pub fn warmup_sample<R: Rng + ?Sized>(
    space: &SearchSpace,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    if count == 0 {
        return Err(Error::InvalidParameter("warm-up count must be at least 1"));
    }
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<f64> = uniform_point(space, rng);
        if out.iter().all(|p| sq_dist(p, &x) > DUP_TOL) {
            out.push(x);
        }
    }
    Ok(out)
}

/// One uniform draw from the box.
pub fn uniform_point<R: Rng + ?Sized>(space: &SearchSpace, rng: &mut R) -> Vec<f64> {
    space
        .lower()
        .iter()
        .zip(space.upper())
        .map(|(&lo, &hi)| {
            let u: f64 = rng.gen();
            (lo + u * (hi - lo)).clamp(lo, hi)
        })
        .collect()
}
