//! Quasi-random standard normal draws: a randomly shifted two-dimensional
//! Halton sequence pushed through the Box-Muller transform.

use core::f64::consts::TAU;

use rand::Rng;

/// Van der Corput radical inverse of `index` in `base`.
pub fn radical_inverse(base: u64, mut index: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    r
}

/// Generator of quasi-random `N(0, 1)` values.
///
/// Each pair of outputs comes from one Halton point in bases (2, 3) with a
/// Cranley-Patterson shift drawn once at construction.
#[derive(Debug, Clone)]
pub struct QmcNormal {
    shift: [f64; 2],
    index: u64,
    pending: Option<f64>,
}

impl QmcNormal {
    /// New sequence with a random shift taken from `rng`.
    pub fn new<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            shift: [rng.gen(), rng.gen()],
            index: 1,
            pending: None,
        }
    }

    fn next_pair(&mut self) -> (f64, f64) {
        let frac = |v: f64| v - libm::floor(v);
        let u1 = frac(radical_inverse(2, self.index) + self.shift[0]).max(f64::MIN_POSITIVE);
        let u2 = frac(radical_inverse(3, self.index) + self.shift[1]);
        self.index += 1;
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let (s, c) = libm::sincos(TAU * u2);
        (r * c, r * s)
    }

    /// Next normal value.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(v) = self.pending.take() {
            return v;
        }
        let (a, b) = self.next_pair();
        self.pending = Some(b);
        a
    }

    /// Fills `out` with consecutive values.
    pub fn fill(&mut self, out: &mut [f64]) {
        for v in out.iter_mut() {
            *v = self.next_normal();
        }
    }
}
