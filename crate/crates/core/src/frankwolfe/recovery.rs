use super::simplex::solve_lp;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::Norm;

#[derive(Debug, Clone, PartialEq)]
pub struct Recovery {
    pub theta: Vec<f64>,
    /// `‖Φθ − b‖₁` at the returned point.
    pub residual_l1: f64,
    pub iterations: usize,
}

/// Slack allowed on `‖Φθ − b‖₁ ≤ ξ` after the solve.
pub fn feasibility_tolerance(xi: f64, b: &[f64]) -> f64 {
    xi * (1.0 + 1e-8) + 1e-10 * (1.0 + Norm::L1.of(b))
}

/// `argmin ‖θ‖₁ s.t. ‖Φθ − b‖₁ ≤ ξ`, as an LP in `(u⁺, u⁻, v)` with
/// `θ = u⁺ − u⁻` and `v` bounding the residual coordinatewise.
pub fn sparse_recover(b: &[f64], phi: &Matrix, xi: f64) -> Result<Recovery> {
    let (k, d) = (phi.rows(), phi.cols());
    if b.len() != k {
        return Err(Error::data(format!("b has length {}, projection has {k} rows", b.len())));
    }
    if !(xi.is_finite() && xi >= 0.0) {
        return Err(Error::param(format!("xi must be finite and >= 0, got {xi}")));
    }
    let vars = 2 * d + k;
    let mut a = Matrix::zeros(2 * k + 1, vars);
    let mut rhs = vec![0.0; 2 * k + 1];
    for j in 0..k {
        for i in 0..d {
            let p = phi[(j, i)];
            a[(j, i)] = p;
            a[(j, d + i)] = -p;
            a[(k + j, i)] = -p;
            a[(k + j, d + i)] = p;
        }
        a[(j, 2 * d + j)] = -1.0;
        a[(k + j, 2 * d + j)] = -1.0;
        rhs[j] = b[j];
        rhs[k + j] = -b[j];
        a[(2 * k, 2 * d + j)] = 1.0;
    }
    rhs[2 * k] = xi;
    let mut cost = vec![1.0; vars];
    cost[2 * d..].iter_mut().for_each(|c| *c = 0.0);

    let sol = solve_lp(&cost, &a, &rhs)?;
    let theta: Vec<f64> = (0..d).map(|i| sol.x[i] - sol.x[d + i]).collect();
    let resid: Vec<f64> = phi.mul_vec(&theta).iter().zip(b).map(|(p, bi)| p - bi).collect();
    let residual_l1 = Norm::L1.of(&resid);
    if residual_l1 > feasibility_tolerance(xi, b) {
        return Err(Error::numeric("recovered point violates the residual bound", residual_l1 - xi));
    }
    Ok(Recovery { theta, residual_l1, iterations: sol.iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frankwolfe::RipMatrix;
    use crate::RngStream;

    #[test]
    fn identity_recovers_exactly() {
        let theta = vec![0.0, 1.5, 0.0, -0.25, 0.0];
        let out = sparse_recover(&theta, &Matrix::identity(5), 0.0).unwrap();
        assert_eq!(out.theta, theta);
    }

    #[test]
    fn exact_recovery_regime() {
        let mut rng = RngStream::new(3, 0);
        let phi = RipMatrix::gaussian(25, 50, &mut rng).unwrap().phi;
        let mut truth = vec![0.0; 50];
        truth[7] = 0.8;
        truth[31] = -0.4;
        let b = phi.mul_vec(&truth);
        let out = sparse_recover(&b, &phi, 1e-8).unwrap();
        let err = Norm::L1.of(&crate::linalg::sub(&out.theta, &truth));
        assert!(err <= 1e-6, "{err}");
        assert!(Norm::L1.of(&out.theta) <= Norm::L1.of(&truth) + 1e-8);
    }

    #[test]
    fn infeasible_is_reported() {
        // A zero row cannot match a nonzero target within ξ = 0.
        let phi = Matrix::zeros(1, 2);
        assert!(matches!(sparse_recover(&[1.0], &phi, 0.0), Err(Error::Infeasible(_))));
    }
}
