use purify_core::accounting::{purify_hyperparams_sgd, sgd_purification_bound};
use purify_core::erm::{purified_dpsgd, ConvexProblem, DpSgdConfig, LeastSquares, MeanQuadratic};
use purify_core::frankwolfe::{purified_fw, PurifiedFwConfig};
use purify_core::linalg::{norm2, sub};
use purify_core::RngStream;
use serde::{Deserialize, Serialize};

use super::{positive, row, Spec};
use crate::error::CliResult;
use crate::table::Row;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ErmSgdParams {
    pub n: usize,
    pub dim: usize,
    pub radius: f64,
    pub eps: f64,
}

impl Default for ErmSgdParams {
    fn default() -> Self {
        Self { n: 1000, dim: 10, radius: 0.5, eps: 1.0 }
    }
}

impl Spec for ErmSgdParams {
    fn columns(&self) -> Vec<&'static str> {
        vec![
            "trial",
            "n",
            "d",
            "eps",
            "iterations",
            "excess_apx",
            "excess_pure",
            "displacement",
            "displacement_bound",
            "mixed",
        ]
    }

    fn validate(&self) -> Vec<String> {
        let mut d = Vec::new();
        positive("radius", self.radius, &mut d);
        positive("eps", self.eps, &mut d);
        if self.n < 2 || self.dim == 0 {
            d.push("need n >= 2 and dim >= 1".into());
            return d;
        }
        if let Ok((_, delta)) = purify_hyperparams_sgd(self.n, self.dim, 2.0 * self.radius) {
            let cap = (self.dim.min(8) as f64) * delta.ln_inv();
            if self.eps > cap {
                d.push(format!(
                    "eps = {} violates the DP-SGD calibration bound eps <= min(d, 8)·ln(1/delta) = {cap:.6}",
                    self.eps
                ));
            }
        }
        d
    }

    fn trial(&self, trial: u64, rng: &mut RngStream) -> CliResult<Vec<Row>> {
        let problem = MeanQuadratic::new(self.dim, self.radius)?;
        let data = problem.synthetic(self.n, rng);
        let out = purified_dpsgd(&problem, &data, self.eps, &DpSgdConfig::default(), rng)?;
        Ok(vec![row![
            trial,
            self.n,
            self.dim,
            self.eps,
            out.sgd.iterations,
            problem.excess_risk(&out.theta_apx, &data),
            problem.excess_risk(&out.theta, &data),
            norm2(&sub(&out.theta_pure, &out.theta_apx)),
            sgd_purification_bound(self.n, self.eps, 2.0 * self.radius),
            out.mixed
        ]])
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ErmFwParams {
    pub n: usize,
    pub dim: usize,
    pub radius: f64,
    pub y_bound: f64,
    pub sparsity: usize,
    pub noise: f64,
    pub eps: f64,
}

impl Default for ErmFwParams {
    fn default() -> Self {
        Self { n: 400, dim: 40, radius: 1.0, y_bound: 2.0, sparsity: 3, noise: 0.1, eps: 1.0 }
    }
}

impl Spec for ErmFwParams {
    fn columns(&self) -> Vec<&'static str> {
        vec![
            "trial",
            "n",
            "d",
            "eps",
            "iterations",
            "rows",
            "xi",
            "noise_l1",
            "recovery_error",
            "risk_fw",
            "risk_pure",
            "theta_l1",
            "success",
            "recovery_failed",
        ]
    }

    fn validate(&self) -> Vec<String> {
        let mut d = Vec::new();
        positive("radius", self.radius, &mut d);
        positive("y_bound", self.y_bound, &mut d);
        positive("eps", self.eps, &mut d);
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            d.push("noise must be finite and >= 0".into());
        }
        if self.n < 2 || self.dim == 0 {
            d.push("need n >= 2 and dim >= 1".into());
        }
        if self.sparsity == 0 || self.sparsity > self.dim {
            d.push(format!("sparsity must lie in 1..={}", self.dim));
        }
        d
    }

    fn trial(&self, trial: u64, rng: &mut RngStream) -> CliResult<Vec<Row>> {
        let problem = LeastSquares::new(self.dim, self.radius, self.y_bound)?;
        let (data, _) = problem.synthetic(self.n, self.sparsity, self.noise, rng)?;
        let out = purified_fw(&problem, &data, self.eps, &PurifiedFwConfig::default(), rng)?;
        Ok(vec![row![
            trial,
            self.n,
            self.dim,
            self.eps,
            out.iterations,
            out.rows,
            out.xi,
            out.noise_l1,
            out.recovery_error(),
            problem.empirical_risk(&out.theta_fw, &data),
            problem.empirical_risk(&out.theta, &data),
            purify_core::Norm::L1.of(&out.theta),
            out.success_path(),
            out.recovery_failed
        ]])
    }
}
