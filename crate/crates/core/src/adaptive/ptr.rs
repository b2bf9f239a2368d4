use super::QuerySpec;
use crate::error::{ensure_positive, Error, Result};
use crate::noise::laplace;
use crate::{purify, LogProb, PurifyParams, RngStream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtrConfig {
    /// Add `Lap(1/ε)` to the distance before testing. Off makes the test
    /// deterministic, which is only useful for checking the release branch.
    pub test_noise: bool,
}

impl Default for PtrConfig {
    fn default() -> Self {
        Self { test_noise: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PtrOutcome {
    /// `None` is ⊥.
    pub value: Option<Vec<f64>>,
    pub distance: usize,
    pub noisy_distance: f64,
}

/// Threshold `ln(1/δ)/ε` the noisy distance must exceed.
pub fn ptr_threshold(eps: f64, delta: LogProb) -> f64 {
    delta.ln_inv() / eps
}

/// Propose-test-release with proposed bound `beta`.
///
/// Releases `q(D) + Lap(β/ε)^d` when `D_β + Lap(1/ε) > ln(1/δ)/ε`, else ⊥.
/// The test consumes one draw, the release `d` more.
pub fn ptr<Q: QuerySpec + ?Sized>(
    query: &Q,
    data: &Q::Data,
    eps: f64,
    delta: LogProb,
    beta: f64,
    config: &PtrConfig,
    rng: &mut RngStream,
) -> Result<PtrOutcome> {
    ensure_positive("eps", eps)?;
    ensure_positive("beta", beta)?;
    let distance = query
        .distance_to_violation(data, beta)
        .ok_or_else(|| Error::Config("query has no distance-to-violation oracle".into()))?;
    let base = if distance == usize::MAX { f64::INFINITY } else { distance as f64 };
    let noise = laplace(rng, 1.0 / eps);
    let noisy_distance = if config.test_noise { base + noise } else { base };
    if noisy_distance <= ptr_threshold(eps, delta) {
        return Ok(PtrOutcome { value: None, distance, noisy_distance });
    }
    let mut value = query.evaluate(data)?;
    for v in value.iter_mut() {
        *v += laplace(rng, beta / eps);
    }
    Ok(PtrOutcome { value: Some(value), distance, noisy_distance })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PurePtr {
    pub value: Vec<f64>,
    pub bottom: bool,
    pub mixed: bool,
    pub projected: bool,
    pub params: PurifyParams,
}

/// PTR made pure: ⊥ becomes a uniform draw from the query domain and the
/// result is purified. The whole mechanism is `(2ε + ε')`-DP.
#[allow(clippy::too_many_arguments)]
pub fn pure_ptr<Q: QuerySpec + ?Sized>(
    query: &Q,
    data: &Q::Data,
    eps: f64,
    eps_prime: f64,
    delta: LogProb,
    omega: LogProb,
    beta: f64,
    rng: &mut RngStream,
) -> Result<PurePtr> {
    let domain = query.domain();
    let params = PurifyParams::new(domain, 2.0 * eps, eps_prime, delta, omega)?;
    let outcome = ptr(query, data, eps, delta, beta, &PtrConfig::default(), rng)?;
    let bottom = outcome.value.is_none();
    let x = match outcome.value {
        Some(v) => v,
        None => domain.sample_uniform(rng),
    };
    let out = purify(&x, domain, &params, rng)?;
    Ok(PurePtr { value: out.point, bottom, mixed: out.mixed, projected: out.projected, params })
}
