//! Private empirical risk minimization over bounded domains.
//!
//! Risks follow the sum convention internally (`F = Σ f`) and are reported
//! as averages `𝓛 = F/n`.

mod laplace_gd;
mod problems;
mod purified;
mod sgd;

pub use laplace_gd::{laplace_noisy_gd, LaplaceGdConfig};
pub use problems::{gradient_check, Labeled, LeastSquares, Logistic, MeanQuadratic};
pub use purified::{purified_dpsgd, PurifiedSgd};
pub use sgd::{dpsgd, DpSgdConfig};

use crate::error::{Error, Result};
use crate::linalg::norm2;
use crate::LqBall;

/// A convex per-example loss over a ball domain.
pub trait ConvexProblem: Sync {
    type Example: Sync;

    fn domain(&self) -> &LqBall;

    /// Bound on per-example gradient norms, measured in the dual of the
    /// domain's norm (`ℓ2` for `ℓ2` balls, `ℓ∞` for `ℓ1` balls).
    fn lipschitz(&self) -> f64;

    fn strong_convexity(&self) -> Option<f64> {
        None
    }

    fn smoothness(&self) -> Option<f64> {
        None
    }

    fn loss(&self, theta: &[f64], x: &Self::Example) -> f64;

    /// Writes `∇f(θ; x)` into `out`.
    fn gradient(&self, theta: &[f64], x: &Self::Example, out: &mut [f64]);

    fn dim(&self) -> usize {
        self.domain().dim()
    }

    /// `𝓛(θ) = (1/n) Σ f(θ; x_i)`.
    fn empirical_risk(&self, theta: &[f64], data: &[Self::Example]) -> f64 {
        data.iter().map(|x| self.loss(theta, x)).sum::<f64>() / data.len().max(1) as f64
    }

    /// `∇𝓛(θ)`.
    fn risk_gradient(&self, theta: &[f64], data: &[Self::Example]) -> Vec<f64> {
        let mut total = vec![0.0; self.dim()];
        let mut g = vec![0.0; self.dim()];
        for x in data {
            self.gradient(theta, x, &mut g);
            for (t, v) in total.iter_mut().zip(&g) {
                *t += v;
            }
        }
        let n = data.len().max(1) as f64;
        total.iter_mut().for_each(|t| *t /= n);
        total
    }
}

/// Projected gradient descent on `𝓛` with a fixed step, for reference optima.
pub fn projected_gd<P: ConvexProblem>(
    problem: &P,
    data: &[P::Example],
    iterations: usize,
    step: f64,
    theta0: &[f64],
) -> Vec<f64> {
    let ball = problem.domain();
    let mut theta = ball.clip(theta0);
    for _ in 0..iterations {
        let g = problem.risk_gradient(&theta, data);
        let next: Vec<f64> = theta.iter().zip(&g).map(|(t, gi)| t - step * gi).collect();
        theta = ball.clip(&next);
    }
    theta
}

pub(crate) fn check_data<T>(data: &[T]) -> Result<()> {
    if data.is_empty() {
        Err(Error::data("dataset is empty"))
    } else {
        Ok(())
    }
}

pub(crate) fn check_finite(v: &[f64], what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::data(format!("non-finite {what}")))
    }
}

/// Scales `g` down to `ℓ2` norm `bound` if it is longer.
pub(crate) fn clip_l2(g: &mut [f64], bound: f64) {
    let n = norm2(g);
    if n > bound {
        let s = bound / n;
        g.iter_mut().for_each(|v| *v *= s);
    }
}
