use crate::erm::ConvexProblem;
use crate::error::{ensure_positive, Error, Result};
use crate::noise::laplace;
use crate::{LogProb, Norm, RngStream};

#[derive(Debug, Clone, PartialEq)]
pub struct FwOutput {
    pub theta: Vec<f64>,
    pub noise_scale: f64,
    /// Selected vertex per iteration: `2i` is `+R e_i`, `2i + 1` is `−R e_i`.
    pub selected: Vec<usize>,
}

/// Laplace scale `L₁R√(8T ln(1/δ))/(nε)` for the vertex scores.
pub fn fw_noise_scale(
    lipschitz: f64,
    radius: f64,
    iterations: usize,
    delta: LogProb,
    n: usize,
    eps: f64,
) -> f64 {
    lipschitz * radius * (8.0 * iterations as f64 * delta.ln_inv()).sqrt() / (n as f64 * eps)
}

/// `η_t = 2/(t + 2)`.
pub fn fw_step(t: usize) -> f64 {
    2.0 / (t as f64 + 2.0)
}

/// Frank-Wolfe over the `ℓ1` ball with Laplace-perturbed vertex selection.
///
/// Scores `±R ∂_i𝓛(θ_t)` get independent Laplace noise (drawn for `+` then
/// `−` of each coordinate), the noisy argmin wins with ties to the lowest
/// index, and `θ_{t+1} = (1 − η_t)θ_t + η_t s`. Starts at 0 and returns `θ_T`.
/// `noise_override` replaces the calibrated scale, e.g. with 0.
pub fn dp_fw<P: ConvexProblem>(
    problem: &P,
    data: &[P::Example],
    eps: f64,
    delta: LogProb,
    iterations: usize,
    noise_override: Option<f64>,
    rng: &mut RngStream,
) -> Result<FwOutput> {
    let ball = problem.domain();
    if ball.norm() != Norm::L1 || ball.center().iter().any(|&c| c != 0.0) {
        return Err(Error::param("Frank-Wolfe needs an l1 ball centered at the origin"));
    }
    if data.is_empty() {
        return Err(Error::data("dataset is empty"));
    }
    if iterations == 0 {
        return Err(Error::param("iterations must be >= 1"));
    }
    ensure_positive("eps", eps)?;
    let r = ball.radius();
    let d = ball.dim();
    let noise_scale = noise_override
        .unwrap_or_else(|| fw_noise_scale(problem.lipschitz(), r, iterations, delta, data.len(), eps));

    let mut theta = vec![0.0; d];
    let mut selected = Vec::with_capacity(iterations);
    for t in 0..iterations {
        let g = problem.risk_gradient(&theta, data);
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::data("non-finite gradient"));
        }
        let mut best = (f64::INFINITY, 0usize);
        for (i, gi) in g.iter().enumerate() {
            let plus = r * gi + laplace(rng, noise_scale);
            let minus = -r * gi + laplace(rng, noise_scale);
            if plus < best.0 {
                best = (plus, 2 * i);
            }
            if minus < best.0 {
                best = (minus, 2 * i + 1);
            }
        }
        let v = best.1;
        let eta = fw_step(t);
        theta.iter_mut().for_each(|x| *x *= 1.0 - eta);
        theta[v / 2] += eta * if v % 2 == 0 { r } else { -r };
        selected.push(v);
    }
    Ok(FwOutput { theta, noise_scale, selected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::erm::LeastSquares;

    fn instance() -> (LeastSquares, Vec<crate::erm::Labeled>) {
        let p = LeastSquares::new(20, 1.0, 1.0).unwrap();
        let (data, _) = p.synthetic(100, 3, 0.1, &mut RngStream::new(1, 0)).unwrap();
        (p, data)
    }

    #[test]
    fn first_step_lands_on_a_vertex() {
        let (p, data) = instance();
        let delta = LogProb::new(1e-6).unwrap();
        let out = dp_fw(&p, &data, 1.0, delta, 1, None, &mut RngStream::new(2, 0)).unwrap();
        assert_eq!(fw_step(0), 1.0);
        let v = out.selected[0];
        let nonzero: Vec<usize> = (0..20).filter(|&i| out.theta[i] != 0.0).collect();
        assert_eq!(nonzero, vec![v / 2]);
        assert_eq!(out.theta[v / 2].abs(), 1.0);
    }

    #[test]
    fn iterates_sparse_and_feasible() {
        let (p, data) = instance();
        let delta = LogProb::new(1e-6).unwrap();
        for seed in 0..10 {
            let out = dp_fw(&p, &data, 0.5, delta, 6, None, &mut RngStream::new(seed, 0)).unwrap();
            let nnz = out.theta.iter().filter(|v| **v != 0.0).count();
            assert!(nnz <= 6);
            assert!(Norm::L1.of(&out.theta) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn zero_noise_matches_reference_frank_wolfe() {
        let (p, data) = instance();
        let delta = LogProb::new(1e-6).unwrap();
        let out = dp_fw(&p, &data, 1.0, delta, 30, Some(0.0), &mut RngStream::new(3, 0)).unwrap();

        // Textbook Frank-Wolfe: linear minimization over ±R e_i is the
        // coordinate of largest |∂_i| with the opposite sign.
        let mut theta = vec![0.0; 20];
        for t in 0..30 {
            let g = p.risk_gradient(&theta, &data);
            let mut i_best = 0;
            for i in 1..20 {
                if g[i].abs() > g[i_best].abs() {
                    i_best = i;
                }
            }
            let s = if g[i_best] > 0.0 { -1.0 } else { 1.0 };
            let eta = 2.0 / (t as f64 + 2.0);
            theta.iter_mut().for_each(|x| *x *= 1.0 - eta);
            theta[i_best] += eta * s;
        }
        for (a, b) in out.theta.iter().zip(&theta) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_l2_domain() {
        let p = crate::erm::MeanQuadratic::new(2, 0.5).unwrap();
        let data = vec![vec![0.0, 0.0]];
        let delta = LogProb::new(1e-6).unwrap();
        assert!(dp_fw(&p, &data, 1.0, delta, 1, None, &mut RngStream::new(0, 0)).is_err());
    }
}
