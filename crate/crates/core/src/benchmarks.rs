//! Synthetic benchmark functions with their boxes and reference minima.
//!
//! Reference minima were established by dense random probing followed by
//! local refinement (see `tests/reference_minima.rs`, which re-derives them).

use alloc::string::ToString;
use core::f64::consts::{E, PI, TAU};

use crate::error::{Error, Result};
use crate::space::SearchSpace;
use crate::surrogate::SurrogateKind;

/// Registered problem names.
pub const PROBLEM_NAMES: [&str; 13] = [
    "ackley",
    "adjiman",
    "bohachevsky",
    "branin",
    "bukin",
    "dropwave",
    "eggholder",
    "hartman3",
    "hartman6",
    "rastrigin",
    "rosenbrock",
    "step2",
    "styblinskitang",
];

/// A synthetic test function on a box.
#[derive(Debug, Clone)]
pub struct BenchmarkProblem {
    name: &'static str,
    space: SearchSpace,
    f: fn(&[f64]) -> f64,
    f_star: f64,
    surrogate_default: SurrogateKind,
}

impl BenchmarkProblem {
    /// Registry name.
    pub fn name(&self) -> &'static str {
        self.name
    }

    /// Number of variables.
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Search box.
    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    /// Global minimum value over the box.
    pub fn f_star(&self) -> f64 {
        self.f_star
    }

    /// Surrogate used for this problem unless overridden.
    pub fn surrogate_default(&self) -> SurrogateKind {
        self.surrogate_default
    }

    /// Objective value at `x`, which must lie in the box.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.space.check(x)?;
        Ok((self.f)(x))
    }

    /// Objective value without the bounds check.
    pub fn evaluate_unchecked(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

type Entry = (
    &'static str,
    &'static [f64],
    &'static [f64],
    fn(&[f64]) -> f64,
    f64,
    SurrogateKind,
);

/// Looks up a problem by name (case-insensitive, `-`/`_` ignored).
pub fn get_problem(name: &str) -> Result<BenchmarkProblem> {
    let key: alloc::string::String = name
        .chars()
        .filter(|c| !matches!(c, '-' | '_' | ' '))
        .flat_map(char::to_lowercase)
        .collect();
    use SurrogateKind::{Idw, Rbf};
    let (name, lower, upper, f, f_star, surrogate): Entry = match key.as_str() {
        "ackley" => ("ackley", &[-32.767; 2], &[32.767; 2], ackley, 0.0, Rbf),
        "adjiman" => (
            "adjiman",
            &[-1.0; 2],
            &[2.0, 1.0],
            adjiman,
            -2.021806783359787,
            Idw,
        ),
        "bohachevsky" => (
            "bohachevsky",
            &[-100.0; 2],
            &[100.0; 2],
            bohachevsky,
            0.0,
            Rbf,
        ),
        "branin" => (
            "branin",
            &[-5.0, 0.0],
            &[10.0, 15.0],
            branin,
            5.0 / (4.0 * PI),
            Idw,
        ),
        "bukin" => ("bukin", &[-15.0, -3.0], &[-5.0, 3.0], bukin, 0.0, Idw),
        "dropwave" => ("dropwave", &[-5.12; 2], &[5.12; 2], dropwave, -1.0, Idw),
        "eggholder" => (
            "eggholder",
            &[-512.0; 2],
            &[512.0; 2],
            eggholder,
            -959.640662720851,
            Idw,
        ),
        "hartman3" => (
            "hartman3",
            &[0.0; 3],
            &[1.0; 3],
            hartman3,
            -3.862779787332663,
            Idw,
        ),
        "hartman6" => (
            "hartman6",
            &[0.0; 6],
            &[1.0; 6],
            hartman6,
            -3.32236801141551,
            Rbf,
        ),
        "rastrigin" => ("rastrigin", &[-5.12; 2], &[5.12; 2], rastrigin, 0.0, Idw),
        "rosenbrock" => ("rosenbrock", &[-5.0; 8], &[10.0; 8], rosenbrock, 0.0, Rbf),
        "step2" => ("step2", &[-100.0; 5], &[100.0; 5], step2, 0.0, Idw),
        "styblinskitang" => (
            "styblinskitang",
            &[-5.0; 5],
            &[5.0; 5],
            styblinski_tang,
            -195.8308285188571,
            Idw,
        ),
        _ => return Err(Error::UnknownProblem(name.to_string())),
    };
    Ok(BenchmarkProblem {
        name,
        space: SearchSpace::new(lower.to_vec(), upper.to_vec())?,
        f,
        f_star,
        surrogate_default: surrogate,
    })
}

fn ackley(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sq: f64 = x.iter().map(|v| v * v).sum();
    let cs: f64 = x.iter().map(|v| libm::cos(TAU * v)).sum();
    -20.0 * libm::exp(-0.2 * libm::sqrt(sq / n)) - libm::exp(cs / n) + 20.0 + E
}

fn adjiman(x: &[f64]) -> f64 {
    libm::cos(x[0]) * libm::sin(x[1]) - x[0] / (x[1] * x[1] + 1.0)
}

fn bohachevsky(x: &[f64]) -> f64 {
    x[0] * x[0] + 2.0 * x[1] * x[1]
        - 0.3 * libm::cos(3.0 * PI * x[0])
        - 0.4 * libm::cos(4.0 * PI * x[1])
        + 0.7
}

fn branin(x: &[f64]) -> f64 {
    let b = 5.1 / (4.0 * PI * PI);
    let c = 5.0 / PI;
    let t = 1.0 / (8.0 * PI);
    let u = x[1] - b * x[0] * x[0] + c * x[0] - 6.0;
    u * u + 10.0 * (1.0 - t) * libm::cos(x[0]) + 10.0
}

fn bukin(x: &[f64]) -> f64 {
    100.0 * libm::sqrt((x[1] - 0.01 * x[0] * x[0]).abs()) + 0.01 * (x[0] + 10.0).abs()
}

fn dropwave(x: &[f64]) -> f64 {
    let r2 = x[0] * x[0] + x[1] * x[1];
    -(1.0 + libm::cos(12.0 * libm::sqrt(r2))) / (0.5 * r2 + 2.0)
}

fn eggholder(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1] + 47.0);
    -b * libm::sin(libm::sqrt((b + a / 2.0).abs())) - a * libm::sin(libm::sqrt((a - b).abs()))
}

const HARTMAN_ALPHA: [f64; 4] = [1.0, 1.2, 3.0, 3.2];

fn hartman<const N: usize>(x: &[f64], a: &[[f64; N]; 4], p: &[[f64; N]; 4]) -> f64 {
    -(0..4)
        .map(|i| {
            let inner: f64 = (0..N).map(|j| a[i][j] * sq(x[j] - 1e-4 * p[i][j])).sum();
            HARTMAN_ALPHA[i] * libm::exp(-inner)
        })
        .sum::<f64>()
}

fn hartman3(x: &[f64]) -> f64 {
    const A: [[f64; 3]; 4] = [
        [3.0, 10.0, 30.0],
        [0.1, 10.0, 35.0],
        [3.0, 10.0, 30.0],
        [0.1, 10.0, 35.0],
    ];
    const P: [[f64; 3]; 4] = [
        [3689.0, 1170.0, 2673.0],
        [4699.0, 4387.0, 7470.0],
        [1091.0, 8732.0, 5547.0],
        [381.0, 5743.0, 8828.0],
    ];
    hartman(x, &A, &P)
}

fn hartman6(x: &[f64]) -> f64 {
    const A: [[f64; 6]; 4] = [
        [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
        [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
        [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
        [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
    ];
    const P: [[f64; 6]; 4] = [
        [1312.0, 1696.0, 5569.0, 124.0, 8283.0, 5886.0],
        [2329.0, 4135.0, 8307.0, 3736.0, 1004.0, 9991.0],
        [2348.0, 1451.0, 3522.0, 2883.0, 3047.0, 6650.0],
        [4047.0, 8828.0, 8732.0, 5743.0, 1091.0, 381.0],
    ];
    hartman(x, &A, &P)
}

fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * libm::cos(TAU * v))
            .sum::<f64>()
}

fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * sq(w[1] - w[0] * w[0]) + sq(1.0 - w[0]))
        .sum()
}

fn step2(x: &[f64]) -> f64 {
    x.iter().map(|v| sq(libm::floor(v + 0.5))).sum()
}

fn styblinski_tang(x: &[f64]) -> f64 {
    0.5 * x
        .iter()
        .map(|v| sq(v * v) - 16.0 * v * v + 5.0 * v)
        .sum::<f64>()
}

#[inline]
fn sq(v: f64) -> f64 {
    v * v
}
