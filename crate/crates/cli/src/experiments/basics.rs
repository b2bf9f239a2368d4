use purify_core::audit::{estimate_max_divergence, tightness_check};
use purify_core::gaussian::{analytic_gaussian_delta, analytic_gaussian_sigma};
use purify_core::linalg::sub;
use purify_core::{
    folklore_mix, folklore_mix_eps, purify, purify_discrete, LogProb, LqBall, Norm, PurifyParams, RngStream,
};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{positive, row, unit_open, Spec};
use crate::error::{CliError, CliResult};
use crate::table::Row;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Figure1Params {
    pub eps: f64,
    pub sensitivity: f64,
    pub delta_min: f64,
    pub delta_max: f64,
    pub points: usize,
}

impl Default for Figure1Params {
    fn default() -> Self {
        Self { eps: 1.0, sensitivity: 1.0, delta_min: 1e-10, delta_max: 1e-1, points: 46 }
    }
}

impl Figure1Params {
    /// Log-spaced grid from `delta_min` to `delta_max` inclusive.
    pub fn grid(&self) -> Vec<f64> {
        let (a, b) = (self.delta_min.log10(), self.delta_max.log10());
        let k = self.points.max(2) - 1;
        (0..=k).map(|i| 10f64.powf(a + (b - a) * i as f64 / k as f64)).collect()
    }
}

impl Spec for Figure1Params {
    fn columns(&self) -> Vec<&'static str> {
        vec!["delta", "laplace_var", "gaussian_var"]
    }

    fn validate(&self) -> Vec<String> {
        let mut d = Vec::new();
        positive("eps", self.eps, &mut d);
        positive("sensitivity", self.sensitivity, &mut d);
        unit_open("delta_min", self.delta_min, &mut d);
        unit_open("delta_max", self.delta_max, &mut d);
        if self.delta_min > self.delta_max {
            d.push("delta_min must not exceed delta_max".into());
        }
        if self.points < 2 {
            d.push("points must be at least 2".into());
        }
        d
    }

    fn deterministic(&self) -> bool {
        true
    }

    fn trial(&self, _trial: u64, _rng: &mut RngStream) -> CliResult<Vec<Row>> {
        let b = self.sensitivity / self.eps;
        let laplace_var = 2.0 * b * b;
        self.grid()
            .into_iter()
            .map(|delta| {
                let sigma = analytic_gaussian_sigma(self.eps, delta, self.sensitivity)?;
                let check = analytic_gaussian_delta(self.eps, sigma, self.sensitivity);
                if (check - delta).abs() > 1e-8 * delta.max(1e-300) + 1e-15 {
                    return Err(CliError::Runtime(format!(
                        "sigma calibration off at delta {delta:e}: delta(sigma) = {check:e}"
                    )));
                }
                Ok(row![delta, laplace_var, sigma * sigma])
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TightnessParams {
    pub dims: Vec<usize>,
    pub delta_tilde: f64,
    pub samples: usize,
    /// Radial histogram bins. The plug-in TV is biased upward by roughly
    /// `√bins` sampling noise per bin, so keep this modest.
    pub bins: usize,
}

impl Default for TightnessParams {
    fn default() -> Self {
        Self { dims: vec![1, 2], delta_tilde: 0.5, samples: 100_000, bins: 50 }
    }
}

impl Spec for TightnessParams {
    fn columns(&self) -> Vec<&'static str> {
        vec![
            "trial",
            "d",
            "delta_tilde",
            "tv",
            "tv_target",
            "tv_radius",
            "w8_displacement",
            "w8_lower_bound",
            "grid_step",
        ]
    }

    fn validate(&self) -> Vec<String> {
        let mut d = Vec::new();
        unit_open("delta_tilde", self.delta_tilde, &mut d);
        if self.dims.is_empty() || self.dims.iter().any(|&k| !(1..=4).contains(&k)) {
            d.push("dims must be a non-empty list of values in 1..=4".into());
        }
        if self.samples == 0 || self.bins == 0 {
            d.push("samples and bins must be positive".into());
        }
        d
    }

    fn trial(&self, trial: u64, rng: &mut RngStream) -> CliResult<Vec<Row>> {
        self.dims
            .iter()
            .map(|&d| {
                let r = tightness_check(d, self.delta_tilde, self.samples, self.bins, rng)?;
                Ok(row![
                    trial,
                    d,
                    self.delta_tilde,
                    r.tv.estimate,
                    self.delta_tilde.powi(d as i32),
                    r.tv.conf_radius,
                    r.w8_displacement,
                    r.w8_lower_bound,
                    r.grid_step
                ])
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PurifyDemoParams {
    pub norm: String,
    pub dim: usize,
    pub radius: f64,
    pub eps: f64,
    pub eps_prime: f64,
    pub delta: f64,
    pub omega: f64,
}

impl Default for PurifyDemoParams {
    fn default() -> Self {
        Self { norm: "l2".into(), dim: 2, radius: 1.0, eps: 1.0, eps_prime: 1.0, delta: 1e-6, omega: 0.01 }
    }
}

impl Spec for PurifyDemoParams {
    fn columns(&self) -> Vec<&'static str> {
        vec!["trial", "dim", "delta_w8", "l1_displacement", "l1_bound", "mixed", "projected"]
    }

    fn validate(&self) -> Vec<String> {
        let mut d = Vec::new();
        if self.norm.parse::<Norm>().is_err() {
            d.push(format!("norm must be one of l1, l2, linf, got '{}'", self.norm));
        }
        if self.dim == 0 {
            d.push("dim must be positive".into());
        }
        positive("radius", self.radius, &mut d);
        positive("eps", self.eps, &mut d);
        positive("eps_prime", self.eps_prime, &mut d);
        unit_open("delta", self.delta, &mut d);
        unit_open("omega", self.omega, &mut d);
        d
    }

    fn trial(&self, trial: u64, rng: &mut RngStream) -> CliResult<Vec<Row>> {
        let norm: Norm = self.norm.parse().map_err(|_| CliError::Usage("bad norm".into()))?;
        let ball = LqBall::centered(norm, self.dim, self.radius)?;
        let params = PurifyParams::new(
            &ball,
            self.eps,
            self.eps_prime,
            LogProb::new(self.delta)?,
            LogProb::new(self.omega)?,
        )?;
        let x = ball.sample_uniform(rng);
        let out = purify(&x, &ball, &params, rng)?;
        Ok(vec![row![
            trial,
            self.dim,
            params.delta_w8(),
            Norm::L1.of(&sub(&out.point, &x)),
            params.l1_error_bound(&ball),
            out.mixed,
            out.projected
        ]])
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditParams {
    /// `purify-discrete` or `folklore`.
    pub mechanism: String,
    pub space: u64,
    pub eps: f64,
    pub delta: f64,
    pub omega: f64,
    pub samples: usize,
}

impl Default for AuditParams {
    fn default() -> Self {
        Self {
            mechanism: "purify-discrete".into(),
            space: 64,
            eps: 1.0,
            delta: 1e-3,
            omega: 0.1,
            samples: 200_000,
        }
    }
}

impl AuditParams {
    /// The audited pure-DP claim.
    pub fn claimed_eps(&self) -> CliResult<f64> {
        match self.mechanism.as_str() {
            "purify-discrete" => Ok(self.eps),
            "folklore" => Ok(folklore_mix_eps(self.space, 0.0, self.delta, self.omega)?),
            m => Err(CliError::Usage(format!("unknown audit mechanism '{m}'"))),
        }
    }
}

impl Spec for AuditParams {
    fn columns(&self) -> Vec<&'static str> {
        vec![
            "trial",
            "mechanism",
            "claimed_eps",
            "estimate",
            "conf_radius",
            "retained_outcomes",
            "one_sided",
            "violated",
        ]
    }

    fn validate(&self) -> Vec<String> {
        let mut d = Vec::new();
        if !matches!(self.mechanism.as_str(), "purify-discrete" | "folklore") {
            d.push(format!("mechanism must be purify-discrete or folklore, got '{}'", self.mechanism));
        }
        if !(2..=1 << 16).contains(&self.space) {
            d.push("space must lie in 2..=65536".into());
        }
        positive("eps", self.eps, &mut d);
        unit_open("delta", self.delta, &mut d);
        unit_open("omega", self.omega, &mut d);
        if self.samples == 0 {
            d.push("samples must be positive".into());
        }
        d
    }

    /// Audits the toy `(0, δ)` mechanism that moves `δ` mass from item 0 to
    /// the last item, post-processed by the chosen transform.
    fn trial(&self, trial: u64, rng: &mut RngStream) -> CliResult<Vec<Row>> {
        let claimed = self.claimed_eps()?;
        let (space, delta) = (self.space, self.delta);
        let toy = move |shifted: &bool, rng: &mut RngStream| -> u64 {
            if *shifted && rng.random::<f64>() < delta {
                space - 1
            } else {
                0
            }
        };
        let lp = LogProb::new(delta)?;
        let (eps, omega) = (self.eps, self.omega);
        let folklore = self.mechanism == "folklore";
        let mech = |d: &bool, rng: &mut RngStream| -> usize {
            let u = toy(d, rng);
            let out = if folklore {
                folklore_mix(u, space, omega, rng)
            } else {
                purify_discrete(u, space, eps, lp, rng).map(|r| r.index)
            };
            out.expect("parameters validated") as usize
        };
        let rep =
            estimate_max_divergence(mech, &true, &false, space as usize, self.samples, Some(claimed), rng)?;
        Ok(vec![row![
            trial,
            self.mechanism.as_str(),
            claimed,
            rep.estimate(),
            rep.conf_radius(),
            rep.retained_outcomes,
            rep.one_sided,
            rep.violated()
        ]])
    }
}
