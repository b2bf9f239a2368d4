use crate::error::{ensure_positive, ensure_unit_open, Error, Result};
use crate::linalg::{norm2, Matrix};
use crate::noise::gaussian;
use crate::{purify, LogProb, LqBall, Norm, PurifyParams, RngStream};

/// Linear regression data with `‖x_i‖₂ ≤ x_bound` and `|y_i| ≤ y_bound`.
#[derive(Debug, Clone)]
pub struct RegressionInstance {
    x: Matrix,
    y: Vec<f64>,
    x_bound: f64,
    y_bound: f64,
}

impl RegressionInstance {
    pub fn new(x: Matrix, y: Vec<f64>, x_bound: f64, y_bound: f64) -> Result<Self> {
        ensure_positive("x_bound", x_bound)?;
        ensure_positive("y_bound", y_bound)?;
        if x.rows() == 0 || x.cols() == 0 {
            return Err(Error::data("design matrix is empty"));
        }
        if x.rows() != y.len() {
            return Err(Error::data(format!("{} rows but {} labels", x.rows(), y.len())));
        }
        let slack = 1.0 + 1e-12;
        for i in 0..x.rows() {
            let row = x.row(i);
            if row.iter().any(|v| !v.is_finite()) || norm2(row) > x_bound * slack {
                return Err(Error::data(format!("row {i} violates the norm bound")));
            }
        }
        if y.iter().any(|v| !v.is_finite() || v.abs() > y_bound * slack) {
            return Err(Error::data("label violates the bound"));
        }
        Ok(Self { x, y, x_bound, y_bound })
    }

    /// Gaussian rows clipped to the unit ball, `θ*` uniform on the unit
    /// sphere and `y = ⟨x, θ*⟩ + N(0, noise²)` clipped to `[-1-3·noise, 1+3·noise]`.
    pub fn synthetic(n: usize, d: usize, noise: f64, rng: &mut RngStream) -> Result<(Self, Vec<f64>)> {
        if n == 0 || d == 0 {
            return Err(Error::param("n and d must be positive"));
        }
        let mut theta: Vec<f64> = (0..d).map(|_| gaussian(rng, 1.0)).collect();
        let t = norm2(&theta);
        theta.iter_mut().for_each(|v| *v /= t);
        let ball = LqBall::centered(Norm::L2, d, 1.0)?;
        let scale = 1.0 / (d as f64).sqrt();
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            let raw: Vec<f64> = (0..d).map(|_| gaussian(rng, scale)).collect();
            rows.push(ball.clip(&raw));
        }
        let y_bound = 1.0 + 3.0 * noise;
        let y = rows
            .iter()
            .map(|r| {
                let v = crate::linalg::dot(r, &theta) + gaussian(rng, noise);
                v.clamp(-y_bound, y_bound)
            })
            .collect();
        Ok((Self::new(Matrix::from_rows(&rows)?, y, 1.0, y_bound)?, theta))
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn dim(&self) -> usize {
        self.x.cols()
    }

    pub fn x_bound(&self) -> f64 {
        self.x_bound
    }

    pub fn y_bound(&self) -> f64 {
        self.y_bound
    }

    /// `‖Xθ − y‖²/n`.
    pub fn mse(&self, theta: &[f64]) -> f64 {
        let pred = self.x.mul_vec(theta);
        pred.iter().zip(&self.y).map(|(p, y)| (p - y).powi(2)).sum::<f64>() / self.n() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaSspConfig {
    /// Failure probability of the ridge calibration.
    pub zeta: f64,
    /// Turns all Gaussian perturbations off; only for testing.
    pub noise: bool,
    pub lambda_override: Option<f64>,
}

impl Default for AdaSspConfig {
    fn default() -> Self {
        Self { zeta: 0.05, noise: true, lambda_override: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaSsp {
    pub theta: Vec<f64>,
    pub lambda: f64,
    /// Private estimate of the smallest eigenvalue of `XᵀX`.
    pub lambda_min: f64,
}

/// Ridge weight `max(0, √(d·ln(6/δ)·ln(2d²/ζ))·X²/(ε/3) − λ̃_min)`.
pub fn adassp_lambda(d: usize, delta: LogProb, zeta: f64, x_bound: f64, eps: f64, lambda_min: f64) -> f64 {
    let d = d as f64;
    let ln6 = 6f64.ln() + delta.ln_inv();
    let e3 = eps / 3.0;
    ((d * ln6 * (2.0 * d * d / zeta).ln()).sqrt() * x_bound * x_bound / e3 - lambda_min).max(0.0)
}

/// Adaptive sufficient-statistics perturbation, `(ε, δ)`-DP.
///
/// Spends `ε/3` each on the smallest eigenvalue, `XᵀX` and `Xᵀy`. Draw order:
/// one normal for the eigenvalue, the upper triangle of `E₁` row by row, then
/// `E₂`.
pub fn adassp(
    inst: &RegressionInstance,
    eps: f64,
    delta: LogProb,
    cfg: &AdaSspConfig,
    rng: &mut RngStream,
) -> Result<AdaSsp> {
    ensure_positive("eps", eps)?;
    ensure_unit_open("zeta", cfg.zeta)?;
    let d = inst.dim();
    let (xb, yb) = (inst.x_bound, inst.y_bound);
    let e3 = eps / 3.0;
    let ln6 = 6f64.ln() + delta.ln_inv();
    let mut draw = |sigma: f64| if cfg.noise { gaussian(rng, sigma) } else { 0.0 };

    let gram = inst.x.gram();
    let fro = norm2(gram.as_slice());
    let eig = gram.symmetric_eigenvalues(1e-13 * fro.max(1e-300))?;
    let lambda_min_true = eig[0];
    let lambda_min = if cfg.noise {
        (lambda_min_true + ln6.sqrt() / e3 * xb * xb * draw(1.0) - ln6 / e3 * xb * xb).max(0.0)
    } else {
        lambda_min_true.max(0.0)
    };
    let lambda = match cfg.lambda_override {
        Some(l) => l,
        None => adassp_lambda(d, delta, cfg.zeta, xb, eps, lambda_min),
    };
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::param(format!("ridge weight must be finite and >= 0, got {lambda}")));
    }

    let s1 = ln6.sqrt() * xb * xb / e3;
    let mut e1 = Matrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let z = draw(s1);
            e1[(i, j)] = z;
            e1[(j, i)] = z;
        }
    }
    let s2 = ln6.sqrt() * xb * yb / e3;
    let mut rhs = inst.x.tr_mul_vec(&inst.y);
    for v in rhs.iter_mut() {
        *v += draw(s2);
    }
    let mut a = gram.add(&e1);
    for i in 0..d {
        a[(i, i)] += lambda;
    }
    let theta = a.solve(&rhs)?;
    Ok(AdaSsp { theta, lambda, lambda_min })
}

/// Norm bound `R̃ = (Y/X)(1 + nε/√(d·ln(6/δ)))` on the AdaSSP estimate.
pub fn trust_radius(n: usize, d: usize, x_bound: f64, y_bound: f64, eps: f64, delta: LogProb) -> f64 {
    let ln6 = 6f64.ln() + delta.ln_inv();
    y_bound / x_bound * (1.0 + n as f64 * eps / (d as f64 * ln6).sqrt())
}

/// `ω = 1/n²` and the fixed point `δ = 2ω/(16·d^{3/2}·R̃·n²)^d`, where `R̃`
/// itself depends on `δ`. Returns `(ω, δ, R̃)`.
pub fn adassp_purify_params(
    n: usize,
    d: usize,
    x_bound: f64,
    y_bound: f64,
    eps: f64,
) -> Result<(LogProb, LogProb, f64)> {
    ensure_positive("eps", eps)?;
    if n < 2 || d == 0 {
        return Err(Error::param("need n >= 2 and d >= 1"));
    }
    let nf = n as f64;
    let df = d as f64;
    let ln_omega = -2.0 * nf.ln();
    let step = |ln_delta: f64| -> Result<f64> {
        let r = trust_radius(n, d, x_bound, y_bound, eps, LogProb::from_ln(ln_delta)?);
        Ok(std::f64::consts::LN_2 + ln_omega - df * (16.0 * df.powf(1.5) * r * nf * nf).ln())
    };
    // R̃ grows with δ, so the map is decreasing in ln δ with slope well
    // below 1 in magnitude; plain iteration converges.
    let mut ln_delta = ln_omega - 1.0;
    for _ in 0..200 {
        let next = step(ln_delta)?;
        if (next - ln_delta).abs() <= 1e-13 * ln_delta.abs() {
            ln_delta = next;
            break;
        }
        ln_delta = next;
    }
    let residual = (step(ln_delta)? - ln_delta).abs();
    if residual > 1e-9 * ln_delta.abs() {
        return Err(Error::numeric("delta fixed point did not converge", residual));
    }
    let delta = LogProb::from_ln(ln_delta)?;
    let r = trust_radius(n, d, x_bound, y_bound, eps, delta);
    Ok((LogProb::from_ln(ln_omega)?, delta, r))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureAdaSsp {
    pub theta: Vec<f64>,
    /// AdaSSP estimate clipped to the trust ball.
    pub theta_apx: Vec<f64>,
    pub radius: f64,
    pub lambda: f64,
    pub params: PurifyParams,
    pub mixed: bool,
}

/// AdaSSP followed by clipping to the ball of radius `R̃` and purification
/// with `ε' = ε`, so `2ε`-DP overall.
pub fn pure_adassp(
    inst: &RegressionInstance,
    eps: f64,
    cfg: &AdaSspConfig,
    rng: &mut RngStream,
) -> Result<PureAdaSsp> {
    let (omega, delta, radius) = adassp_purify_params(inst.n(), inst.dim(), inst.x_bound, inst.y_bound, eps)?;
    let ball = LqBall::centered(Norm::L2, inst.dim(), radius)?;
    let params = PurifyParams::new(&ball, eps, eps, delta, omega)?;
    let est = adassp(inst, eps, delta, cfg, rng)?;
    let theta_apx = ball.clip(&est.theta);
    let out = purify(&theta_apx, &ball, &params, rng)?;
    Ok(PureAdaSsp { theta: out.point, theta_apx, radius, lambda: est.lambda, params, mixed: out.mixed })
}
