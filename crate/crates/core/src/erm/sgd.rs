use super::{check_data, check_finite, clip_l2, ConvexProblem};
use crate::accounting::{SgdHyperParams, StepSize};
use crate::error::{Error, Result};
use crate::noise::gaussian;
use crate::RngStream;

#[derive(Debug, Clone, PartialEq)]
pub struct DpSgdConfig {
    /// Clip per-example gradients to `ℓ2` norm `L`.
    pub clip: bool,
    /// Starting point; the domain center when `None`.
    pub theta0: Option<Vec<f64>>,
}

impl Default for DpSgdConfig {
    fn default() -> Self {
        Self { clip: true, theta0: None }
    }
}

/// Noisy projected SGD on `F = Σ f`.
///
/// Each step samples `batch_size` examples without replacement, sums their
/// gradients, adds `N(0, σ²I)`, divides by `γ` and takes a projected step.
/// Returns the average of `θ_1, …, θ_T`, or the `2t/(T(T+1))`-weighted
/// average under a decaying schedule.
pub fn dpsgd<P: ConvexProblem>(
    problem: &P,
    data: &[P::Example],
    params: &SgdHyperParams,
    config: &DpSgdConfig,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    check_data(data)?;
    let n = data.len();
    let d = problem.dim();
    let ball = problem.domain();
    let batch = params.batch_size.min(n);
    if !(params.gamma > 0.0 && params.gamma <= 1.0) || params.iterations == 0 {
        return Err(Error::param("invalid SGD hyperparameters"));
    }
    let sigma = params.sigma2.sqrt();
    let lipschitz = problem.lipschitz();

    let mut theta = match &config.theta0 {
        Some(t) if t.len() == d => ball.clip(t),
        Some(_) => return Err(Error::param("theta0 has the wrong dimension")),
        None => ball.center().to_vec(),
    };
    let big_t = params.iterations as f64;
    let mut out = vec![0.0; d];
    let mut g = vec![0.0; d];
    let mut step_dir = vec![0.0; d];
    for t in 1..=params.iterations {
        step_dir.iter_mut().for_each(|v| *v = 0.0);
        for i in rand::seq::index::sample(rng, n, batch).iter() {
            problem.gradient(&theta, &data[i], &mut g);
            if config.clip {
                clip_l2(&mut g, lipschitz);
            }
            for (s, v) in step_dir.iter_mut().zip(&g) {
                *s += v;
            }
        }
        check_finite(&step_dir, "gradient")?;
        let eta = params.step.at(t);
        for (th, s) in theta.iter_mut().zip(&step_dir) {
            let noisy = (s + gaussian(rng, sigma)) / params.gamma;
            *th -= eta * noisy;
        }
        theta = ball.clip(&theta);
        let w = match params.step {
            StepSize::Constant(_) => 1.0 / big_t,
            StepSize::Decaying { .. } => 2.0 * t as f64 / (big_t * (big_t + 1.0)),
        };
        for (o, th) in out.iter_mut().zip(&theta) {
            *o += w * th;
        }
    }
    // Rounding in the running average can leave it a hair outside.
    Ok(ball.clip(&out))
}
