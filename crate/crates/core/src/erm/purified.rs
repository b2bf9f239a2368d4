use super::{dpsgd, ConvexProblem, DpSgdConfig};
use crate::accounting::{purify_hyperparams_sgd, sgd_hyperparams, Convexity, SgdHyperParams};
use crate::error::{Error, Result};
use crate::{purify, Norm, PurifyParams, RngStream};

#[derive(Debug, Clone, PartialEq)]
pub struct PurifiedSgd {
    /// Purified output clipped back to the domain.
    pub theta: Vec<f64>,
    /// Purified output before the final clip.
    pub theta_pure: Vec<f64>,
    /// The approximate-DP iterate average that was purified.
    pub theta_apx: Vec<f64>,
    pub sgd: SgdHyperParams,
    pub purify: PurifyParams,
    pub mixed: bool,
}

/// `2ε`-pure DP-SGD: DP-SGD at the `δ` of the purification calibration,
/// then purification with `ε' = ε` and `ω = 1/n²`.
pub fn purified_dpsgd<P: ConvexProblem>(
    problem: &P,
    data: &[P::Example],
    eps: f64,
    config: &DpSgdConfig,
    rng: &mut RngStream,
) -> Result<PurifiedSgd> {
    let ball = problem.domain();
    if ball.norm() != Norm::L2 {
        return Err(Error::param("purified DP-SGD needs an l2-ball domain"));
    }
    let n = data.len();
    let d = problem.dim();
    let c = ball.diameter();
    let (omega, delta) = purify_hyperparams_sgd(n, d, c)?;
    let convexity = problem.strong_convexity().map_or(Convexity::Convex, Convexity::Strong);
    let sgd = sgd_hyperparams(n, d, eps, delta, problem.lipschitz(), c, convexity)?;
    let theta_apx = dpsgd(problem, data, &sgd, config, rng)?;
    let params = PurifyParams::new(ball, eps, eps, delta, omega)?;
    let out = purify(&theta_apx, ball, &params, rng)?;
    Ok(PurifiedSgd {
        theta: ball.clip(&out.point),
        theta_pure: out.point,
        theta_apx,
        sgd,
        purify: params,
        mixed: out.mixed,
    })
}
