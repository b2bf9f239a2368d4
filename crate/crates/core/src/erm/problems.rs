use rand::Rng;

use super::ConvexProblem;
use crate::error::{ensure_positive, Error, Result};
use crate::linalg::{dot, norm2};
use crate::noise::gaussian;
use crate::{LqBall, Norm, RngStream};

/// `f(θ; x) = ½‖θ − x‖²` on a centered `ℓ2` ball; data must lie in the ball.
#[derive(Debug, Clone)]
pub struct MeanQuadratic {
    domain: LqBall,
    strong: bool,
}

impl MeanQuadratic {
    pub fn new(dim: usize, radius: f64) -> Result<Self> {
        Ok(Self { domain: LqBall::centered(Norm::L2, dim, radius)?, strong: true })
    }

    /// Hides the strong convexity so solvers use their convex variants.
    pub fn convex_only(mut self) -> Self {
        self.strong = false;
        self
    }

    /// Points `clip(c + N(0, s²I))` around a random center `c` in the inner
    /// half of the ball, with `s = radius/(2√d)`.
    pub fn synthetic(&self, n: usize, rng: &mut RngStream) -> Vec<Vec<f64>> {
        let r = self.domain.radius();
        let inner = LqBall::centered(Norm::L2, self.dim(), 0.5 * r).expect("valid ball");
        let c = inner.sample_uniform(rng);
        let s = r / (2.0 * (self.dim() as f64).sqrt());
        (0..n)
            .map(|_| {
                let x: Vec<f64> = c.iter().map(|ci| ci + gaussian(rng, s)).collect();
                self.domain.clip(&x)
            })
            .collect()
    }

    /// The empirical minimizer: the data mean projected onto the ball.
    pub fn optimum(&self, data: &[Vec<f64>]) -> Vec<f64> {
        let n = data.len().max(1) as f64;
        let mut mean = vec![0.0; self.dim()];
        for x in data {
            for (m, v) in mean.iter_mut().zip(x) {
                *m += v / n;
            }
        }
        self.domain.clip(&mean)
    }

    /// `𝓛(θ) − 𝓛(θ*)`, computed from the mean to avoid cancellation.
    pub fn excess_risk(&self, theta: &[f64], data: &[Vec<f64>]) -> f64 {
        let n = data.len().max(1) as f64;
        let mut mean = vec![0.0; self.dim()];
        for x in data {
            for (m, v) in mean.iter_mut().zip(x) {
                *m += v / n;
            }
        }
        let opt = self.domain.clip(&mean);
        let a: f64 = theta.iter().zip(&mean).map(|(t, m)| (t - m).powi(2)).sum();
        let b: f64 = opt.iter().zip(&mean).map(|(t, m)| (t - m).powi(2)).sum();
        0.5 * (a - b)
    }
}

impl ConvexProblem for MeanQuadratic {
    type Example = Vec<f64>;

    fn domain(&self) -> &LqBall {
        &self.domain
    }

    fn lipschitz(&self) -> f64 {
        self.domain.diameter()
    }

    fn strong_convexity(&self) -> Option<f64> {
        self.strong.then_some(1.0)
    }

    fn smoothness(&self) -> Option<f64> {
        Some(1.0)
    }

    fn loss(&self, theta: &[f64], x: &Vec<f64>) -> f64 {
        0.5 * theta.iter().zip(x).map(|(t, v)| (t - v).powi(2)).sum::<f64>()
    }

    fn gradient(&self, theta: &[f64], x: &Vec<f64>, out: &mut [f64]) {
        for ((o, t), v) in out.iter_mut().zip(theta).zip(x) {
            *o = t - v;
        }
    }
}

/// A feature vector with a response or label.
#[derive(Debug, Clone, PartialEq)]
pub struct Labeled {
    pub a: Vec<f64>,
    pub y: f64,
}

/// `f(θ; (a, y)) = ln(1 + exp(−y⟨a, θ⟩))` with `‖a‖₂ ≤ 1`, `y = ±1`.
#[derive(Debug, Clone)]
pub struct Logistic {
    domain: LqBall,
}

impl Logistic {
    pub fn new(dim: usize, radius: f64) -> Result<Self> {
        Ok(Self { domain: LqBall::centered(Norm::L2, dim, radius)? })
    }

    /// Features uniform in the unit `ℓ2` ball; labels from a logistic model
    /// whose parameter is drawn from the domain.
    pub fn synthetic(&self, n: usize, rng: &mut RngStream) -> Vec<Labeled> {
        let unit = LqBall::centered(Norm::L2, self.dim(), 1.0).expect("valid ball");
        let truth = self.domain.sample_uniform(rng);
        (0..n)
            .map(|_| {
                let a = unit.sample_uniform(rng);
                let p = 1.0 / (1.0 + (-dot(&a, &truth)).exp());
                let y = if rng.random::<f64>() < p { 1.0 } else { -1.0 };
                Labeled { a, y }
            })
            .collect()
    }
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl ConvexProblem for Logistic {
    type Example = Labeled;

    fn domain(&self) -> &LqBall {
        &self.domain
    }

    fn lipschitz(&self) -> f64 {
        1.0
    }

    fn smoothness(&self) -> Option<f64> {
        Some(0.25)
    }

    fn loss(&self, theta: &[f64], x: &Labeled) -> f64 {
        softplus(-x.y * dot(&x.a, theta))
    }

    fn gradient(&self, theta: &[f64], x: &Labeled, out: &mut [f64]) {
        let w = -x.y * sigmoid(-x.y * dot(&x.a, theta));
        for (o, a) in out.iter_mut().zip(&x.a) {
            *o = w * a;
        }
    }
}

/// `f(θ; (a, y)) = ½(⟨a, θ⟩ − y)²` on a centered `ℓ1` ball of radius `R`,
/// with `‖a‖∞ ≤ 1` and `|y| ≤ y_bound`.
///
/// Gradients are bounded by `R + y_bound` in `ℓ∞`, and the loss is
/// `1`-smooth with respect to `ℓ1`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    domain: LqBall,
    y_bound: f64,
}

impl LeastSquares {
    pub fn new(dim: usize, radius: f64, y_bound: f64) -> Result<Self> {
        ensure_positive("y_bound", y_bound)?;
        Ok(Self { domain: LqBall::centered(Norm::L1, dim, radius)?, y_bound })
    }

    /// Rademacher features, an `s`-sparse truth on the boundary of the
    /// domain, and responses `⟨a, θ*⟩ + N(0, noise²)` clamped to the bound.
    pub fn synthetic(
        &self,
        n: usize,
        sparsity: usize,
        noise: f64,
        rng: &mut RngStream,
    ) -> Result<(Vec<Labeled>, Vec<f64>)> {
        let d = self.dim();
        if sparsity == 0 || sparsity > d {
            return Err(Error::param(format!("sparsity must lie in 1..={d}")));
        }
        let mut truth = vec![0.0; d];
        let support = rand::seq::index::sample(rng, d, sparsity);
        let r = self.domain.radius() / sparsity as f64;
        for i in support.iter() {
            truth[i] = if rng.random::<bool>() { r } else { -r };
        }
        let data = (0..n)
            .map(|_| {
                let a: Vec<f64> = (0..d).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
                let y = (dot(&a, &truth) + gaussian(rng, noise)).clamp(-self.y_bound, self.y_bound);
                Labeled { a, y }
            })
            .collect();
        Ok((data, truth))
    }
}

impl ConvexProblem for LeastSquares {
    type Example = Labeled;

    fn domain(&self) -> &LqBall {
        &self.domain
    }

    fn lipschitz(&self) -> f64 {
        self.domain.radius() + self.y_bound
    }

    fn smoothness(&self) -> Option<f64> {
        Some(1.0)
    }

    fn loss(&self, theta: &[f64], x: &Labeled) -> f64 {
        0.5 * (dot(&x.a, theta) - x.y).powi(2)
    }

    fn gradient(&self, theta: &[f64], x: &Labeled, out: &mut [f64]) {
        let r = dot(&x.a, theta) - x.y;
        for (o, a) in out.iter_mut().zip(&x.a) {
            *o = r * a;
        }
    }
}

/// Largest relative disagreement between `gradient` and central differences.
pub fn gradient_check<P: ConvexProblem>(problem: &P, theta: &[f64], x: &P::Example) -> f64 {
    let d = problem.dim();
    let mut g = vec![0.0; d];
    problem.gradient(theta, x, &mut g);
    let h = 1e-6;
    let scale = norm2(&g).max(1e-8);
    let mut worst: f64 = 0.0;
    for i in 0..d {
        let mut up = theta.to_vec();
        let mut down = theta.to_vec();
        up[i] += h;
        down[i] -= h;
        let fd = (problem.loss(&up, x) - problem.loss(&down, x)) / (2.0 * h);
        worst = worst.max((fd - g[i]).abs() / scale);
    }
    worst
}
