//! Bounded `ℓq` balls used as output domains.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::noise::{exp1, gaussian, open_unit};
use crate::RngStream;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub fn of(self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => v.iter().map(|x| x.abs()).sum(),
            Norm::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Norm::Linf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    /// `d^{1 - 1/q}`, the factor bounding `‖·‖₁` by `‖·‖_q`.
    pub fn l1_factor(self, dim: usize) -> f64 {
        let d = dim as f64;
        match self {
            Norm::L1 => 1.0,
            Norm::L2 => d.sqrt(),
            Norm::Linf => d,
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::Linf => "linf",
        })
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" | "1" => Ok(Norm::L1),
            "l2" | "2" => Ok(Norm::L2),
            "linf" | "inf" => Ok(Norm::Linf),
            other => Err(Error::param(format!("unknown norm {other:?}"))),
        }
    }
}

/// The set `{x : ‖x − center‖_q ≤ radius}`.
///
/// Stores the radius. Calibrations that need the `ℓq` diameter go through
/// [`LqBall::diameter`].
#[derive(Debug, Clone, PartialEq)]
pub struct LqBall {
    norm: Norm,
    center: Vec<f64>,
    radius: f64,
}

impl LqBall {
    pub fn new(norm: Norm, center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::param("ball dimension must be >= 1"));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("ball center must be finite"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::param(format!("ball radius must be finite and > 0, got {radius}")));
        }
        Ok(Self { norm, center, radius })
    }

    pub fn centered(norm: Norm, dim: usize, radius: f64) -> Result<Self> {
        Self::new(norm, vec![0.0; dim], radius)
    }

    /// The cube `[0, 1]^dim`, i.e. the `ℓ∞` ball of radius ½ around `(½, …, ½)`.
    pub fn unit_cube(dim: usize) -> Result<Self> {
        Self::new(Norm::Linf, vec![0.5; dim], 0.5)
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    /// `‖x − center‖_q`.
    pub fn distance_from_center(&self, x: &[f64]) -> f64 {
        let diff: Vec<f64> = x.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        self.norm.of(&diff)
    }

    /// Membership test: exact for `ℓ1`/`ℓ∞`, `1e-12` relative slack for `ℓ2`.
    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        let r = self.distance_from_center(x);
        match self.norm {
            Norm::L2 => r <= self.radius * (1.0 + 1e-12),
            Norm::L1 | Norm::Linf => r <= self.radius,
        }
    }

    /// Uniform draw from the ball in `O(d)` expected time.
    pub fn sample_uniform(&self, rng: &mut RngStream) -> Vec<f64> {
        loop {
            let x = self.sample_once(rng);
            // Rounding of center + offset can land a hair outside the boundary.
            if self.contains(&x) {
                return x;
            }
        }
    }

    fn sample_once(&self, rng: &mut RngStream) -> Vec<f64> {
        let d = self.dim();
        let r = self.radius;
        let offset: Vec<f64> = match self.norm {
            Norm::Linf => (0..d).map(|_| r * (2.0 * rng.random::<f64>() - 1.0)).collect(),
            Norm::L2 => {
                let g: Vec<f64> = (0..d).map(|_| gaussian(rng, 1.0)).collect();
                let len = Norm::L2.of(&g);
                let scale = r * open_unit(rng).powf(1.0 / d as f64) / len;
                g.into_iter().map(|v| v * scale).collect()
            }
            Norm::L1 => {
                // Dirichlet(1, …, 1) on the simplex, random signs, radial U^{1/d}.
                let e: Vec<f64> = (0..d).map(|_| exp1(rng)).collect();
                let total: f64 = e.iter().sum();
                let scale = r * open_unit(rng).powf(1.0 / d as f64) / total;
                e.into_iter().map(|v| if rng.random::<bool>() { v * scale } else { -v * scale }).collect()
            }
        };
        offset.iter().zip(&self.center).map(|(o, c)| o + c).collect()
    }

    /// Maps `x` into the ball.
    ///
    /// Identity inside. Outside, `ℓ1`/`ℓ2` balls scale radially toward the
    /// center and the `ℓ∞` ball clamps each coordinate. Idempotent.
    pub fn clip(&self, x: &[f64]) -> Vec<f64> {
        if self.contains(x) {
            return x.to_vec();
        }
        match self.norm {
            Norm::Linf => {
                x.iter().zip(&self.center).map(|(v, c)| v.clamp(c - self.radius, c + self.radius)).collect()
            }
            Norm::L1 | Norm::L2 => {
                let dist = self.distance_from_center(x);
                let mut scale = self.radius / dist;
                loop {
                    let y: Vec<f64> = x.iter().zip(&self.center).map(|(v, c)| c + (v - c) * scale).collect();
                    if self.contains(&y) {
                        return y;
                    }
                    scale *= 1.0 - 4.0 * f64::EPSILON;
                }
            }
        }
    }
}
