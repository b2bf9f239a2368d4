use super::{dp_fw, sparse_recover, RipMatrix};
use crate::erm::ConvexProblem;
use crate::error::{ensure_positive, Error, Result};
use crate::linalg::sub;
use crate::{purify, LogProb, LqBall, Norm, PurifyParams, RngStream};

#[derive(Debug, Clone, PartialEq)]
pub struct PurifiedFwConfig {
    /// Multiplier on `√(βRnε/L₁)` for the iteration count.
    pub t_const: f64,
    /// Multiplier on `T ln(max(d/T, 2)) + ln n` for the projection rows.
    pub k_const: f64,
    pub iterations: Option<usize>,
    pub rows: Option<usize>,
}

impl Default for PurifiedFwConfig {
    fn default() -> Self {
        Self { t_const: 1.0, k_const: 2.0, iterations: None, rows: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PurifiedFw {
    /// Final output, `ℓ1`-clipped to the domain.
    pub theta: Vec<f64>,
    /// Approximate-DP Frank-Wolfe output.
    pub theta_fw: Vec<f64>,
    /// Sparse-recovery solution before the final clip (zero on fallback).
    pub theta_recovered: Vec<f64>,
    pub iterations: usize,
    pub rows: usize,
    pub omega: LogProb,
    pub delta: LogProb,
    pub delta_w8: f64,
    pub xi: f64,
    /// `‖z_pure − clip(Φθ_fw)‖₁`, the noise the recovery has to absorb.
    pub noise_l1: f64,
    pub mixed: bool,
    /// `Φθ_fw` lay outside the `ℓ2` ball of radius `2R`.
    pub projection_clipped: bool,
    /// The recovery LP failed and the output fell back to 0.
    pub recovery_failed: bool,
}

impl PurifiedFw {
    /// `‖θ_recovered − θ_fw‖₁`.
    pub fn recovery_error(&self) -> f64 {
        Norm::L1.of(&sub(&self.theta_recovered, &self.theta_fw))
    }

    /// Mixing and the Laplace tail both went the good way and recovery ran.
    pub fn success_path(&self) -> bool {
        !self.mixed && !self.projection_clipped && !self.recovery_failed && self.noise_l1 <= self.xi
    }
}

/// `(T, k)` with `T = ⌈c_T √(βRnε/L₁)⌉` and `k = ⌈c_k(T ln(max(d/T, 2)) + ln n)⌉`.
pub fn purified_fw_sizes(
    beta: f64,
    radius: f64,
    lipschitz: f64,
    n: usize,
    d: usize,
    eps: f64,
    config: &PurifiedFwConfig,
) -> (usize, usize) {
    let nf = n as f64;
    let t = config.iterations.unwrap_or_else(|| {
        ((config.t_const * (beta * radius * nf * eps / lipschitz).sqrt()).ceil() as usize).max(1)
    });
    let k = config.rows.unwrap_or_else(|| {
        let tf = t as f64;
        let v = config.k_const * (tf * (d as f64 / tf).max(2.0).ln() + nf.ln());
        (v.ceil() as usize).max(1)
    });
    (t, k)
}

/// `2ε`-pure Frank-Wolfe: approximate-DP Frank-Wolfe, a Gaussian projection
/// to `k` dimensions, purification there, and `ℓ1` sparse recovery.
///
/// An infeasible recovery LP falls back to the origin with a flag.
pub fn purified_fw<P: ConvexProblem>(
    problem: &P,
    data: &[P::Example],
    eps: f64,
    config: &PurifiedFwConfig,
    rng: &mut RngStream,
) -> Result<PurifiedFw> {
    ensure_positive("eps", eps)?;
    let ball = problem.domain();
    let beta = problem
        .smoothness()
        .ok_or_else(|| Error::Config("purified Frank-Wolfe needs a smoothness constant".into()))?;
    let n = data.len();
    if n < 2 {
        return Err(Error::data("need at least two examples"));
    }
    let d = ball.dim();
    let r = ball.radius();
    let (t, k) = purified_fw_sizes(beta, r, problem.lipschitz(), n, d, eps, config);

    let nf = n as f64;
    let omega = LogProb::new(1.0 / nf)?;
    let ln_delta = std::f64::consts::LN_2 + omega.ln() - k as f64 * (nf * k as f64).ln();
    let delta = LogProb::from_ln(ln_delta)?;

    let fw = dp_fw(problem, data, eps, delta, t, None, rng)?;
    let phi = RipMatrix::gaussian(k, d, rng)?.phi;
    let target = LqBall::centered(Norm::L2, k, 2.0 * r)?;
    let projected = phi.mul_vec(&fw.theta);
    let projection_clipped = !target.contains(&projected);
    let z = target.clip(&projected);
    let params = PurifyParams::new(&target, eps, eps, delta, omega)?;
    let out = purify(&z, &target, &params, rng)?;
    let noise_l1 = Norm::L1.of(&sub(&out.point, &z));
    let xi = 4.0 * params.delta_w8() / eps * (k as f64 + nf.ln());

    let (recovered, recovery_failed) = match sparse_recover(&out.point, &phi, xi) {
        Ok(rec) => (rec.theta, false),
        Err(Error::Infeasible(_)) => (vec![0.0; d], true),
        Err(e) => return Err(e),
    };
    Ok(PurifiedFw {
        theta: ball.clip(&recovered),
        theta_fw: fw.theta,
        theta_recovered: recovered,
        iterations: t,
        rows: k,
        omega,
        delta,
        delta_w8: params.delta_w8(),
        xi,
        noise_l1,
        mixed: out.mixed,
        projection_clipped,
        recovery_failed,
    })
}
