use super::{check_data, check_finite, ConvexProblem};
use crate::error::{ensure_positive, Error, Result};
use crate::noise::laplace;
use crate::{Norm, RngStream};

/// Calibration of full-batch gradient descent with Laplace noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceGdConfig {
    pub iterations: usize,
    /// Per-coordinate Laplace scale added to each full gradient sum.
    pub noise_scale: f64,
    pub step: f64,
    /// `ℓ1` sensitivity of one gradient sum.
    pub sensitivity: f64,
    /// The iteration count computed below 1 and was raised to 1.
    pub clamped: bool,
}

impl LaplaceGdConfig {
    /// `T = ⌊εnL/(Δ₁√d)⌋`, `σ = Δ₁T/ε` and `η = C/√(T(n²L² + 2dσ²))`, with
    /// `Δ₁ = √d·L` unless given.
    pub fn calibrate(
        n: usize,
        d: usize,
        eps: f64,
        lipschitz: f64,
        diameter: f64,
        sensitivity: Option<f64>,
    ) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::param("n and d must be >= 1"));
        }
        ensure_positive("eps", eps)?;
        ensure_positive("lipschitz", lipschitz)?;
        ensure_positive("diameter", diameter)?;
        let (nf, df) = (n as f64, d as f64);
        let delta1 = sensitivity.unwrap_or(df.sqrt() * lipschitz);
        ensure_positive("sensitivity", delta1)?;
        let raw = (eps * nf * lipschitz / (delta1 * df.sqrt())).floor();
        let clamped = raw < 1.0;
        let iterations = if clamped { 1 } else { raw as usize };
        let tf = iterations as f64;
        let noise_scale = delta1 * tf / eps;
        let step =
            diameter / (tf * (nf * nf * lipschitz * lipschitz + 2.0 * df * noise_scale * noise_scale)).sqrt();
        Ok(Self { iterations, noise_scale, step, sensitivity: delta1, clamped })
    }
}

/// Projected full-batch gradient descent on `F = Σ f` with i.i.d. Laplace
/// noise on every gradient coordinate. Returns the average of `θ_1, …, θ_T`.
///
/// With `clip`, per-example gradients are scaled to `ℓ1` norm at most the
/// configured sensitivity.
pub fn laplace_noisy_gd<P: ConvexProblem>(
    problem: &P,
    data: &[P::Example],
    config: &LaplaceGdConfig,
    clip: bool,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    check_data(data)?;
    let d = problem.dim();
    let ball = problem.domain();
    let mut theta = ball.center().to_vec();
    let mut avg = vec![0.0; d];
    let mut g = vec![0.0; d];
    let mut sum = vec![0.0; d];
    let tf = config.iterations as f64;
    for _ in 0..config.iterations {
        sum.iter_mut().for_each(|v| *v = 0.0);
        for x in data {
            problem.gradient(&theta, x, &mut g);
            if clip {
                let l1 = Norm::L1.of(&g);
                if l1 > config.sensitivity {
                    let s = config.sensitivity / l1;
                    g.iter_mut().for_each(|v| *v *= s);
                }
            }
            for (s, v) in sum.iter_mut().zip(&g) {
                *s += v;
            }
        }
        check_finite(&sum, "gradient")?;
        for (th, s) in theta.iter_mut().zip(&sum) {
            *th -= config.step * (s + laplace(rng, config.noise_scale));
        }
        theta = ball.clip(&theta);
        for (a, th) in avg.iter_mut().zip(&theta) {
            *a += th / tf;
        }
    }
    Ok(ball.clip(&avg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::erm::{projected_gd, MeanQuadratic};

    #[test]
    fn calibration_plug_in() {
        let c = LaplaceGdConfig::calibrate(100, 4, 1.0, 1.0, 1.0, Some(2.0)).unwrap();
        assert_eq!(c.iterations, 25);
        assert!((c.noise_scale - 50.0).abs() < 1e-12);
        let eta = 1.0 / (25.0 * (1e4 + 8.0 * 2500.0f64)).sqrt();
        assert!((c.step - eta).abs() < 1e-15);
        assert!(!c.clamped);
    }

    #[test]
    fn tiny_budget_clamps() {
        let c = LaplaceGdConfig::calibrate(3, 100, 0.01, 1.0, 1.0, None).unwrap();
        assert_eq!(c.iterations, 1);
        assert!(c.clamped);
    }

    #[test]
    fn zero_noise_matches_projected_gd() {
        let p = MeanQuadratic::new(3, 0.5).unwrap();
        let mut rng = RngStream::new(4, 0);
        let data = p.synthetic(50, &mut rng);
        let mut cfg = LaplaceGdConfig::calibrate(50, 3, 1.0, 1.0, 1.0, None).unwrap();
        cfg.noise_scale = 0.0;
        let out = laplace_noisy_gd(&p, &data, &cfg, true, &mut rng).unwrap();

        // Reference trajectory: projected GD on 𝓛 with step nη, averaged.
        let n = data.len() as f64;
        let mut theta = p.domain().center().to_vec();
        let mut avg = vec![0.0; 3];
        for _ in 0..cfg.iterations {
            theta = projected_gd(&p, &data, 1, n * cfg.step, &theta);
            for (a, t) in avg.iter_mut().zip(&theta) {
                *a += t / cfg.iterations as f64;
            }
        }
        for (a, b) in out.iter().zip(&avg) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
