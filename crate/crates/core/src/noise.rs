//! Scalar and vector noise samplers.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::RngStream;

/// One draw from `Laplace(0, scale)` with density `exp(-|x|/scale) / (2 scale)`.
///
/// A zero scale returns exactly `0.0` while still consuming one uniform, so
/// turning noise off does not shift the rest of the stream.
pub fn laplace(rng: &mut RngStream, scale: f64) -> f64 {
    // u in (-1/2, 1/2]; inverse CDF.
    let u: f64 = rng.random::<f64>() - 0.5;
    if scale == 0.0 {
        return 0.0;
    }
    let mag = -(1.0 - 2.0 * u.abs()).max(f64::MIN_POSITIVE).ln();
    scale * mag.copysign(u)
}

pub fn laplace_vec(rng: &mut RngStream, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim).map(|_| laplace(rng, scale)).collect()
}

pub fn gaussian(rng: &mut RngStream, sigma: f64) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    sigma * z
}

pub fn gaussian_vec(rng: &mut RngStream, dim: usize, sigma: f64) -> Vec<f64> {
    (0..dim).map(|_| gaussian(rng, sigma)).collect()
}

/// Uniform on the open interval `(0, 1)`.
pub(crate) fn open_unit(rng: &mut RngStream) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Standard exponential.
pub(crate) fn exp1(rng: &mut RngStream) -> f64 {
    -open_unit(rng).ln()
}
