use purify_core::adaptive::{
    local_sens_purify_params, mode_release, private_local_sensitivity_release, pure_adassp, pure_ptr,
    AdaSspConfig, BoundedMedian, QuerySpec, RegressionInstance, ScaledHistogram,
};
use purify_core::linalg::{norm2, sub};
use purify_core::{LogProb, RngStream};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{positive, row, unit_open, Spec};
use crate::error::CliResult;
use crate::table::Row;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PtrParams {
    pub n: usize,
    /// Records are uniform on `[center − spread, center + spread]` in `[0, 1]`.
    pub center: f64,
    pub spread: f64,
    pub eps: f64,
    pub eps_prime: f64,
    pub delta: f64,
    pub omega: f64,
    pub beta: f64,
}

impl Default for PtrParams {
    fn default() -> Self {
        Self {
            n: 1001,
            center: 0.5,
            spread: 0.1,
            eps: 1.0,
            eps_prime: 1.0,
            delta: 1e-6,
            omega: 0.01,
            beta: 0.05,
        }
    }
}

impl Spec for PtrParams {
    fn columns(&self) -> Vec<&'static str> {
        vec!["trial", "n", "median", "released", "abs_error", "bottom", "mixed"]
    }

    fn validate(&self) -> Vec<String> {
        let mut d = Vec::new();
        if self.n == 0 {
            d.push("n must be positive".into());
        }
        if !(self.spread >= 0.0 && self.center - self.spread >= 0.0 && self.center + self.spread <= 1.0) {
            d.push("center ± spread must lie in [0, 1]".into());
        }
        positive("eps", self.eps, &mut d);
        positive("eps_prime", self.eps_prime, &mut d);
        positive("beta", self.beta, &mut d);
        unit_open("delta", self.delta, &mut d);
        unit_open("omega", self.omega, &mut d);
        d
    }

    fn trial(&self, trial: u64, rng: &mut RngStream) -> CliResult<Vec<Row>> {
        let q = BoundedMedian::new(0.0, 1.0)?;
        let data: Vec<f64> = (0..self.n)
            .map(|_| (self.center + self.spread * (2.0 * rng.random::<f64>() - 1.0)).clamp(0.0, 1.0))
            .collect();
        let median = q.evaluate(&data)?[0];
        let out = pure_ptr(
            &q,
            &data[..],
            self.eps,
            self.eps_prime,
            LogProb::new(self.delta)?,
            LogProb::new(self.omega)?,
            self.beta,
            rng,
        )?;
        let v = out.value[0];
        Ok(vec![row![trial, self.n, median, v, (v - median).abs(), out.bottom, out.mixed]])
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalSensParams {
    pub n: usize,
    pub categories: usize,
    pub weight: f64,
    pub eps: f64,
}

impl Default for LocalSensParams {
    fn default() -> Self {
        Self { n: 1000, categories: 8, weight: 1.0, eps: 1.0 }
    }
}

impl Spec for LocalSensParams {
    fn columns(&self) -> Vec<&'static str> {
        vec![
            "trial",
            "n",
            "d",
            "local_sensitivity",
            "beta_hat",
            "clamped",
            "l2_error_apx",
            "l2_error_pure",
            "mixed",
        ]
    }

    fn validate(&self) -> Vec<String> {
        let mut d = Vec::new();
        if self.n == 0 || self.categories == 0 {
            d.push("n and categories must be positive".into());
        }
        positive("weight", self.weight, &mut d);
        positive("eps", self.eps, &mut d);
        d
    }

    fn trial(&self, trial: u64, rng: &mut RngStream) -> CliResult<Vec<Row>> {
        let q = ScaledHistogram::new(self.categories, self.weight)?;
        // Geometric-ish category frequencies.
        let data: Vec<usize> = (0..self.n)
            .map(|_| {
                let u: f64 = rng.random();
                ((-(1.0 - u).ln() * 2.0) as usize).min(self.categories - 1)
            })
            .collect();
        let truth = q.evaluate(&data)?;
        let (omega, delta) = local_sens_purify_params(self.categories, 2.0 * self.weight, self.eps)?;
        let out = private_local_sensitivity_release(&q, &data[..], self.eps, delta, omega, rng)?;
        Ok(vec![row![
            trial,
            self.n,
            self.categories,
            q.local_sensitivity(&data).unwrap_or(0.0),
            out.beta_hat,
            out.clamped,
            norm2(&sub(&out.value_apx, &truth)),
            norm2(&sub(&out.value, &truth)),
            out.mixed
        ]])
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModeParams {
    pub universe: u64,
    pub eps: f64,
    pub mode: u64,
    pub mode_count: usize,
    pub runner_up_count: usize,
    /// Extra records spread uniformly over the universe.
    pub background: usize,
}

impl Default for ModeParams {
    fn default() -> Self {
        Self { universe: 256, eps: 1.0, mode: 42, mode_count: 500, runner_up_count: 100, background: 0 }
    }
}

impl Spec for ModeParams {
    fn columns(&self) -> Vec<&'static str> {
        vec!["trial", "mode", "released", "correct", "bottom", "gap", "threshold_ok", "mixed"]
    }

    fn validate(&self) -> Vec<String> {
        let mut d = Vec::new();
        if self.universe < 3 {
            d.push("universe must have at least 3 items".into());
        }
        if self.mode >= self.universe {
            d.push("mode must lie in the universe".into());
        }
        positive("eps", self.eps, &mut d);
        if self.mode_count == 0 {
            d.push("mode_count must be positive".into());
        }
        d
    }

    fn trial(&self, trial: u64, rng: &mut RngStream) -> CliResult<Vec<Row>> {
        let runner_up = (self.mode + 1) % self.universe;
        let mut data = vec![self.mode; self.mode_count];
        data.extend(std::iter::repeat_n(runner_up, self.runner_up_count));
        data.extend((0..self.background).map(|_| rng.random_range(0..self.universe)));
        let out = mode_release(&data, self.universe, self.eps, rng)?;
        Ok(vec![row![
            trial,
            out.stats.mode,
            out.item,
            out.item == out.stats.mode,
            out.bottom,
            out.stats.gap,
            out.threshold_ok,
            out.mixed
        ]])
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdaSspParams {
    pub n: usize,
    pub dim: usize,
    pub noise: f64,
    pub eps: f64,
}

impl Default for AdaSspParams {
    fn default() -> Self {
        Self { n: 800, dim: 4, noise: 0.1, eps: 1.0 }
    }
}

impl Spec for AdaSspParams {
    fn columns(&self) -> Vec<&'static str> {
        vec!["trial", "n", "d", "eps", "lambda", "param_error_apx", "param_error_pure", "mse_pure", "mixed"]
    }

    fn validate(&self) -> Vec<String> {
        let mut d = Vec::new();
        if self.n < 2 || self.dim == 0 {
            d.push("need n >= 2 and dim >= 1".into());
        }
        positive("eps", self.eps, &mut d);
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            d.push("noise must be finite and >= 0".into());
        }
        d
    }

    fn trial(&self, trial: u64, rng: &mut RngStream) -> CliResult<Vec<Row>> {
        let (inst, truth) = RegressionInstance::synthetic(self.n, self.dim, self.noise, rng)?;
        let out = pure_adassp(&inst, self.eps, &AdaSspConfig::default(), rng)?;
        Ok(vec![row![
            trial,
            self.n,
            self.dim,
            self.eps,
            out.lambda,
            norm2(&sub(&out.theta_apx, &truth)).powi(2),
            norm2(&sub(&out.theta, &truth)).powi(2),
            inst.mse(&out.theta),
            out.mixed
        ]])
    }
}
