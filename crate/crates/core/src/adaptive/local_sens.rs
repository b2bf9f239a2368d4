use super::QuerySpec;
use crate::error::{ensure_positive, Error, Result};
use crate::noise::laplace;
use crate::{purify, LogProb, PurifyParams, RngStream};

#[derive(Debug, Clone, PartialEq)]
pub struct LsRelease {
    pub value: Vec<f64>,
    /// Projected noisy answer before purification.
    pub value_apx: Vec<f64>,
    pub beta_hat: f64,
    /// `β̂` came out non-positive and was reset to `ln(2/δ)/ε`.
    pub clamped: bool,
    pub mixed: bool,
    pub params: PurifyParams,
}

/// `ω = min(1/100, 1/(Cε²))` and `δ = 2ω/(16dCε)^d` for a domain of diameter `C`.
pub fn local_sens_purify_params(dim: usize, diameter: f64, eps: f64) -> Result<(LogProb, LogProb)> {
    ensure_positive("diameter", diameter)?;
    ensure_positive("eps", eps)?;
    if dim == 0 {
        return Err(Error::param("dimension must be positive"));
    }
    let omega = (0.01f64).min(1.0 / (diameter * eps * eps));
    let d = dim as f64;
    let ln_delta = std::f64::consts::LN_2 + omega.ln() - d * (16.0 * d * diameter * eps).ln();
    Ok((LogProb::new(omega)?, LogProb::from_ln(ln_delta)?))
}

/// Releases `q(D)` with noise scaled to a private upper bound on its local
/// sensitivity, then purifies with `ε' = ε`.
///
/// `β̂ = LS(D) + Lap(1/ε) + ln(2/δ)/ε` is the bound; the query needs a local
/// sensitivity oracle whose own global sensitivity is at most 1.
pub fn private_local_sensitivity_release<Q: QuerySpec + ?Sized>(
    query: &Q,
    data: &Q::Data,
    eps: f64,
    delta: LogProb,
    omega: LogProb,
    rng: &mut RngStream,
) -> Result<LsRelease> {
    ensure_positive("eps", eps)?;
    let ls = query
        .local_sensitivity(data)
        .ok_or_else(|| Error::Config("query has no local-sensitivity oracle".into()))?;
    let domain = query.domain();
    let params = PurifyParams::new(domain, 2.0 * eps, eps, delta, omega)?;
    let slack = (std::f64::consts::LN_2 + delta.ln_inv()) / eps;
    let mut beta_hat = ls + laplace(rng, 1.0 / eps) + slack;
    let clamped = beta_hat <= 0.0;
    if clamped {
        beta_hat = slack;
    }
    let mut noisy = query.evaluate(data)?;
    for v in noisy.iter_mut() {
        *v += laplace(rng, beta_hat / eps);
    }
    let value_apx = domain.clip(&noisy);
    let out = purify(&value_apx, domain, &params, rng)?;
    Ok(LsRelease { value: out.point, value_apx, beta_hat, clamped, mixed: out.mixed, params })
}
