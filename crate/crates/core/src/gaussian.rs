//! Analytic calibration of the Gaussian mechanism.

use statrs::function::erf::erfc;

use crate::error::{ensure_positive, ensure_unit_open, Error, Result};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Exact `δ` achieved by `N(0, σ²)` noise on an `ℓ2`-sensitivity-`Δ` query at
/// privacy level `ε`:
/// `Φ(Δ/2σ − εσ/Δ) − e^ε Φ(−Δ/2σ − εσ/Δ)`.
pub fn analytic_gaussian_delta(eps: f64, sigma: f64, sensitivity: f64) -> f64 {
    let a = sensitivity / (2.0 * sigma);
    let b = eps * sigma / sensitivity;
    let lower = normal_cdf(-a - b);
    // e^ε·Φ(·) in log space; Φ may be tiny while e^ε is large.
    let scaled = if lower > 0.0 { (eps + lower.ln()).exp() } else { 0.0 };
    normal_cdf(a - b) - scaled
}

/// Smallest `σ` (to `1e-12` relative) with `analytic_gaussian_delta ≤ δ`.
pub fn analytic_gaussian_sigma(eps: f64, delta: f64, sensitivity: f64) -> Result<f64> {
    ensure_positive("eps", eps)?;
    ensure_unit_open("delta", delta)?;
    ensure_positive("sensitivity", sensitivity)?;
    let f = |s: f64| analytic_gaussian_delta(eps, s, sensitivity) - delta;

    // δ(σ) decreases from 1 to 0 as σ grows.
    let mut lo = sensitivity;
    let mut hi = sensitivity;
    let mut guard = 0;
    while f(lo) <= 0.0 {
        lo /= 2.0;
        guard += 1;
        if guard > 2000 || lo == 0.0 {
            return Err(Error::numeric("could not bracket sigma from below", f(lo)));
        }
    }
    while f(hi) > 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 2000 || !hi.is_finite() {
            return Err(Error::numeric("could not bracket sigma from above", f(hi)));
        }
    }
    for _ in 0..200 {
        if hi - lo <= 1e-12 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// `Δ√(2 ln(1.25/δ))/ε`, the classical calibration (valid for `ε ≤ 1`).
pub fn classical_gaussian_sigma(eps: f64, delta: f64, sensitivity: f64) -> f64 {
    sensitivity * (2.0 * (1.25 / delta).ln()).sqrt() / eps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_reference_points() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        let v = normal_cdf(1.959963984540054);
        assert!((v - 0.975).abs() < 1e-11, "{v}");
        assert!(normal_cdf(-40.0) >= 0.0);
    }

    #[test]
    fn sigma_decreases_in_delta() {
        let deltas = [1e-12, 1e-9, 1e-6, 1e-3, 1e-1];
        for eps in [0.1, 1.0, 4.0] {
            let s: Vec<f64> = deltas.iter().map(|&d| analytic_gaussian_sigma(eps, d, 1.0).unwrap()).collect();
            assert!(s.windows(2).all(|p| p[0] > p[1]), "{s:?}");
        }
    }

    #[test]
    fn below_classical_bound() {
        for eps in [0.05, 0.3, 1.0] {
            for delta in [1e-10, 1e-6, 1e-3, 0.05] {
                for sens in [0.5, 1.0, 3.0] {
                    let s = analytic_gaussian_sigma(eps, delta, sens).unwrap();
                    assert!(s <= classical_gaussian_sigma(eps, delta, sens));
                }
            }
        }
    }

    #[test]
    fn returned_sigma_hits_delta() {
        for eps in [0.2, 1.0, 3.0] {
            for delta in [1e-10, 1e-5, 1e-2, 0.3] {
                let s = analytic_gaussian_sigma(eps, delta, 2.0).unwrap();
                let back = analytic_gaussian_delta(eps, s, 2.0);
                assert!((back - delta).abs() < 1e-8, "{eps} {delta}: {back}");
                assert!(back <= delta);
            }
        }
    }

    #[test]
    fn sigma_scales_with_sensitivity() {
        let a = analytic_gaussian_sigma(1.0, 1e-5, 1.0).unwrap();
        let b = analytic_gaussian_sigma(1.0, 1e-5, 3.0).unwrap();
        assert!((b / a - 3.0).abs() < 1e-9);
    }
}
