//! Closed-form privacy accounting and hyperparameter calculators.

use crate::error::{ensure_positive, ensure_unit_open, Error, Result};
use crate::LogProb;

/// `ρ`-zCDP implies `(ρ + 2√(ρ ln(1/δ)), δ)`-DP.
pub fn zcdp_to_dp(rho: f64, delta: LogProb) -> Result<f64> {
    ensure_positive("rho", rho)?;
    if delta.ln() >= 0.0 {
        return Err(Error::param("delta must lie in (0, 1)"));
    }
    Ok(rho + 2.0 * (rho * delta.ln_inv()).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsampledZcdp {
    pub rho: f64,
    /// Largest Rényi order covered by the bound, `ln(1/γ)/(4ρ₀)`.
    pub alpha_max: f64,
    /// Whether the order needed for the `δ` target lies within `alpha_max`.
    pub valid: Option<bool>,
}

/// `ρ = 13γ²ρ₀T` for `T` rounds of a `ρ₀`-zCDP Gaussian step on a
/// `γ`-subsample.
pub fn subsampled_gaussian_zcdp(
    rho0: f64,
    gamma: f64,
    iterations: usize,
    delta_target: Option<LogProb>,
) -> Result<SubsampledZcdp> {
    ensure_positive("rho0", rho0)?;
    ensure_unit_open("gamma", gamma)?;
    if iterations == 0 {
        return Err(Error::param("iterations must be >= 1"));
    }
    let rho = 13.0 * gamma * gamma * rho0 * iterations as f64;
    let alpha_max = (1.0 / gamma).ln() / (4.0 * rho0);
    let valid = delta_target.map(|d| 1.0 + (d.ln_inv() / rho).sqrt() <= alpha_max);
    Ok(SubsampledZcdp { rho, alpha_max, valid })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Convexity {
    Convex,
    /// `λ`-strongly convex.
    Strong(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    Constant(f64),
    /// `η_t = 2/(nλ(t+1))` for `t = 1, …, T`.
    Decaying {
        n: usize,
        lambda: f64,
    },
}

impl StepSize {
    pub fn at(&self, t: usize) -> f64 {
        match *self {
            StepSize::Constant(eta) => eta,
            StepSize::Decaying { n, lambda } => 2.0 / (n as f64 * lambda * (t as f64 + 1.0)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgdHyperParams {
    pub gamma: f64,
    pub batch_size: usize,
    pub sigma2: f64,
    pub iterations: usize,
    pub step: StepSize,
    /// Total zCDP of the run.
    pub rho: f64,
    /// `ε ≤ min(d, 8)·ln(1/δ)`; the calibration's guarantee needs it.
    pub valid: bool,
}

/// DP-SGD calibration for `(ε, δ)`-DP on `n` examples in dimension `d` with
/// `L`-Lipschitz losses over a domain of `ℓ2` diameter `c`.
pub fn sgd_hyperparams(
    n: usize,
    d: usize,
    eps: f64,
    delta: LogProb,
    lipschitz: f64,
    c: f64,
    convexity: Convexity,
) -> Result<SgdHyperParams> {
    if n == 0 || d == 0 {
        return Err(Error::param("n and d must be >= 1"));
    }
    ensure_positive("eps", eps)?;
    ensure_positive("lipschitz", lipschitz)?;
    ensure_positive("diameter", c)?;
    if delta.ln() >= 0.0 {
        return Err(Error::param("delta must lie in (0, 1)"));
    }
    let (nf, df, l) = (n as f64, d as f64, lipschitz);
    let log_inv = delta.ln_inv();

    let gamma = (2.0 * (df * log_inv).sqrt() / (nf * eps.sqrt())).min(1.0);
    let batch_size = ((gamma * nf).round() as usize).max(1);
    let sigma2 = 416.0 * l * l * log_inv / eps;
    let iterations = ((nf * nf * eps * eps / (df * log_inv)).floor() as usize).max(1);
    let step = match convexity {
        Convexity::Convex => {
            let denom =
                iterations as f64 * (nf * nf * l * l + df * sigma2 / (gamma * gamma) + nf * l * l / gamma);
            StepSize::Constant((c * c / denom).sqrt())
        }
        Convexity::Strong(lambda) => {
            ensure_positive("lambda", lambda)?;
            StepSize::Decaying { n, lambda }
        }
    };
    // Each step adds N(0, σ²) to a sum with sensitivity L: ρ₀ = L²/(2σ²).
    let rho0 = l * l / (2.0 * sigma2);
    let rho = if gamma < 1.0 {
        subsampled_gaussian_zcdp(rho0, gamma, iterations, None)?.rho
    } else {
        rho0 * iterations as f64
    };
    let valid = eps <= (df.min(8.0)) * log_inv;
    Ok(SgdHyperParams { gamma, batch_size, sigma2, iterations, step, rho, valid })
}

/// Mixture level `ω = 1/n²` and `δ = 2ω/(16Cdn²)^d` for purifying DP-SGD.
pub fn purify_hyperparams_sgd(n: usize, d: usize, c: f64) -> Result<(LogProb, LogProb)> {
    if n < 2 || d == 0 {
        return Err(Error::param("need n >= 2 and d >= 1"));
    }
    ensure_positive("diameter", c)?;
    let nf = n as f64;
    let n2 = nf * nf;
    let base = 16.0 * c * d as f64 * n2;
    let omega = LogProb::new(1.0 / n2)?;
    let ln_delta = std::f64::consts::LN_2 - 2.0 * nf.ln() - d as f64 * base.ln();
    // 2/(n²·base^d) is a single rounding when everything is an exact integer.
    let direct = match i32::try_from(d) {
        Ok(di) => 2.0 / (n2 * base.powi(di)),
        Err(_) => 0.0,
    };
    Ok((omega, LogProb::from_parts(direct, ln_delta)?))
}

/// `1/(n²ε) + C/n²`, the expected displacement bound of purified DP-SGD.
pub fn sgd_purification_bound(n: usize, eps: f64, c: f64) -> f64 {
    let n2 = (n as f64).powi(2);
    1.0 / (n2 * eps) + c / n2
}

/// `ln(ε^d/(2d)^{3d})`.
pub fn discrete_delta_threshold_ln(d: usize, eps: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::param("d must be >= 1"));
    }
    ensure_positive("eps", eps)?;
    let df = d as f64;
    Ok(df * eps.ln() - 3.0 * df * (2.0 * df).ln())
}

/// `ε^d/(2d)^{3d}`; zero when it underflows (use the `_ln` form then).
pub fn discrete_delta_threshold(d: usize, eps: f64) -> Result<f64> {
    let ln = discrete_delta_threshold_ln(d, eps)?;
    if let Ok(di) = i32::try_from(d) {
        let direct = eps.powi(di) / (2.0 * d as f64).powi(3 * di);
        if direct.is_normal() {
            return Ok(direct);
        }
    }
    Ok(ln.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(p: f64) -> LogProb {
        LogProb::new(p).unwrap()
    }

    #[test]
    fn zcdp_conversion_examples() {
        let e = zcdp_to_dp(0.01, lp(1e-6)).unwrap();
        assert!((e - (0.01 + 2.0 * (0.01 * 1e6f64.ln()).sqrt())).abs() < 1e-15);
        assert!((e - 0.7534).abs() < 1e-4);
        let e = zcdp_to_dp(1.0, LogProb::from_ln(-1.0).unwrap()).unwrap();
        assert!((e - 3.0).abs() < 1e-15);
        let e = zcdp_to_dp(0.3, lp(1.0 - 1e-12)).unwrap();
        assert!((e - 0.3).abs() < 1e-5);
    }

    #[test]
    fn zcdp_conversion_monotone() {
        let rhos = [0.01, 0.1, 0.5, 2.0];
        let deltas = [1e-2, 1e-5, 1e-9];
        for &d in &deltas {
            let v: Vec<f64> = rhos.iter().map(|&r| zcdp_to_dp(r, lp(d)).unwrap()).collect();
            assert!(v.windows(2).all(|p| p[0] < p[1]));
        }
        for &r in &rhos {
            let v: Vec<f64> = deltas.iter().map(|&d| zcdp_to_dp(r, lp(d)).unwrap()).collect();
            assert!(v.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn subsampled_examples() {
        let r = subsampled_gaussian_zcdp(0.5, 0.1, 10, None).unwrap();
        assert!((r.rho - 0.65).abs() < 1e-12);
        let r2 = subsampled_gaussian_zcdp(0.5, 0.1, 20, None).unwrap();
        assert!((r2.rho - 2.0 * r.rho).abs() < 1e-12);
        assert!(subsampled_gaussian_zcdp(0.5, 1.0, 10, None).is_err());
        let small = subsampled_gaussian_zcdp(1e-3, 0.01, 100, Some(lp(1e-5))).unwrap();
        assert_eq!(small.valid, Some(1.0 + (1e5f64.ln() / small.rho).sqrt() <= small.alpha_max));
    }

    #[test]
    fn sgd_plug_in() {
        let h = sgd_hyperparams(1000, 10, 1.0, lp(1e-5), 1.0, 1.0, Convexity::Convex).unwrap();
        assert!((h.gamma - 0.021459).abs() < 1e-6, "{}", h.gamma);
        assert!((h.sigma2 - 4789.4).abs() < 0.05, "{}", h.sigma2);
        assert_eq!(h.iterations, 8685);
        assert_eq!(h.batch_size, 21);
        assert!(h.valid);

        let log_inv = 1e5f64.ln();
        let gamma = 2.0 * (10.0 * log_inv).sqrt() / 1000.0;
        let sigma2 = 416.0 * log_inv;
        let eta = (1.0 / (8685.0 * (1e6 + 10.0 * sigma2 / (gamma * gamma) + 1000.0 / gamma))).sqrt();
        match h.step {
            StepSize::Constant(v) => assert!((v - eta).abs() < 1e-9 * eta),
            other => panic!("{other:?}"),
        }
        // Calibrated so that ρ ≈ ε²/(16 ln(1/δ)), up to the floor on T.
        let target = 1.0 / (16.0 * log_inv);
        assert!((h.rho - target).abs() < 1e-3 * target);
    }

    #[test]
    fn sgd_validity_flag() {
        let delta = lp(1e-5);
        let eps = 100.0 * delta.ln_inv();
        let h = sgd_hyperparams(1000, 10, eps, delta, 1.0, 1.0, Convexity::Convex).unwrap();
        assert!(!h.valid);
        assert!(h.gamma <= 1.0);
    }

    #[test]
    fn strongly_convex_schedule() {
        let h = sgd_hyperparams(500, 3, 1.0, lp(1e-6), 1.0, 1.0, Convexity::Strong(0.5)).unwrap();
        assert!((h.step.at(1) - 2.0 / (500.0 * 0.5 * 2.0)).abs() < 1e-15);
        assert!(h.step.at(10) < h.step.at(9));
    }

    #[test]
    fn purification_params_plug_in() {
        let (omega, delta) = purify_hyperparams_sgd(10, 2, 1.0).unwrap();
        assert_eq!(omega.value(), 0.01);
        assert_eq!(delta.value(), 1.953125e-9);
        assert!((sgd_purification_bound(10, 1.0, 1.0) - 0.02).abs() < 1e-15);
    }

    #[test]
    fn purification_delta_log_form_agrees() {
        for d in 1..=20 {
            let (_, delta) = purify_hyperparams_sgd(37, d, 0.7).unwrap();
            let direct = 2.0 / (37f64.powi(2) * (16.0 * 0.7 * d as f64 * 37f64.powi(2)).powi(d as i32));
            if direct.is_normal() {
                assert!((delta.ln() - direct.ln()).abs() < 1e-12 * direct.ln().abs());
            }
        }
        let (_, deep) = purify_hyperparams_sgd(1000, 200, 1.0).unwrap();
        assert_eq!(deep.value(), 0.0);
        assert!(deep.ln().is_finite());
    }

    #[test]
    fn purification_delta_decreases_in_d() {
        let lns: Vec<f64> = (1..30).map(|d| purify_hyperparams_sgd(50, d, 1.0).unwrap().1.ln()).collect();
        assert!(lns.windows(2).all(|p| p[0] > p[1]));
    }

    #[test]
    fn discrete_threshold_examples() {
        assert_eq!(discrete_delta_threshold(1, 1.0).unwrap(), 0.125);
        assert_eq!(discrete_delta_threshold(2, 1.0).unwrap(), 1.0 / 4096.0);
        assert_eq!(discrete_delta_threshold(8, 1.0).unwrap(), 16f64.powi(-24));
        let ln = discrete_delta_threshold_ln(8, 1.0).unwrap();
        assert!((ln + 24.0 * 16f64.ln()).abs() < 1e-12);
        assert!(discrete_delta_threshold_ln(4096, 1.0).unwrap().is_finite());
    }
}
