//! Optimality gap `G = (initial_best - final_best) / (initial_best - f_star)`.

use thiserror::Error;

/// The gap is undefined when the warm-up already hit the optimum.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("optimality gap undefined: initial best {initial_best} equals f* {f_star}")]
pub struct DegenerateGap {
    pub initial_best: f64,
    pub f_star: f64,
}

/// Gap in `[0, 1]` for any run whose warm-up minimum is above `f_star`.
pub fn optimality_gap(
    initial_best: f64,
    final_best: f64,
    f_star: f64,
) -> Result<f64, DegenerateGap> {
    let span = initial_best - f_star;
    if span.is_nan() || span <= 0.0 {
        return Err(DegenerateGap {
            initial_best,
            f_star,
        });
    }
    Ok((initial_best - final_best) / span)
}
