use rand::Rng;

use crate::error::{ensure_positive, Error, Result};
use crate::RngStream;

/// Samples `i` with probability `∝ exp(ε₀·scores_i/(2·sensitivity))`.
///
/// Computed with the maximum subtracted; `-∞` scores get zero mass.
/// Consumes one uniform.
pub fn exponential_mechanism(
    scores: &[f64],
    eps0: f64,
    sensitivity: f64,
    rng: &mut RngStream,
) -> Result<usize> {
    ensure_positive("eps0", eps0)?;
    ensure_positive("sensitivity", sensitivity)?;
    if scores.iter().any(|s| s.is_nan() || *s == f64::INFINITY) {
        return Err(Error::param("scores must be finite or -inf"));
    }
    let c = eps0 / (2.0 * sensitivity);
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::param("all scores are -inf"));
    }
    let w: Vec<f64> = scores.iter().map(|s| (c * (s - max)).exp()).collect();
    let total: f64 = w.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, wi) in w.iter().enumerate() {
        if *wi > 0.0 {
            last = i;
            acc += wi;
            if u < acc {
                return Ok(i);
            }
        }
    }
    Ok(last)
}
