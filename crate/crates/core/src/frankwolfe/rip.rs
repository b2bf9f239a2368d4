use crate::error::{ensure_positive, ensure_unit_open, Error, Result};
use crate::linalg::Matrix;
use crate::noise::gaussian;
use crate::RngStream;

/// A `k × d` Gaussian projection with i.i.d. `N(0, 1/k)` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct RipMatrix {
    pub phi: Matrix,
    /// Target sparsity and distortion the row count was sized for, if any.
    pub sparsity: Option<usize>,
    pub distortion: Option<f64>,
    /// More rows than columns: the projection does not reduce dimension.
    pub exceeds_dim: bool,
}

impl RipMatrix {
    pub fn gaussian(k: usize, d: usize, rng: &mut RngStream) -> Result<Self> {
        if k == 0 || d == 0 {
            return Err(Error::param("projection needs k, d >= 1"));
        }
        let sd = 1.0 / (k as f64).sqrt();
        let phi = Matrix::from_fn(k, d, |_, _| gaussian(rng, sd));
        Ok(Self { phi, sparsity: None, distortion: None, exceeds_dim: k > d })
    }

    pub fn rows(&self) -> usize {
        self.phi.rows()
    }

    pub fn cols(&self) -> usize {
        self.phi.cols()
    }
}

/// `k = ⌈C(s ln(d/s) + ln(1/ζ))/e²⌉` rows for `(e, s)`-RIP w.p. `1 − ζ`.
pub fn rip_rows(s: usize, d: usize, e: f64, zeta: f64, c: f64) -> Result<usize> {
    if s == 0 || s > d {
        return Err(Error::param(format!("sparsity must lie in 1..={d}, got {s}")));
    }
    ensure_unit_open("e", e)?;
    ensure_unit_open("zeta", zeta)?;
    ensure_positive("c", c)?;
    let v = c * (s as f64 * (d as f64 / s as f64).ln() + (1.0 / zeta).ln()) / (e * e);
    Ok((v.ceil() as usize).max(1))
}

/// RIP parameters `(e/5, 25s/e²)` that imply `(e, s)`-restricted
/// well-conditioning.
pub fn rwc_rip_params(e: f64, s: usize) -> (f64, usize) {
    (e / 5.0, (25.0 * s as f64 / (e * e)).ceil() as usize)
}

/// Draws a Gaussian projection sized for `(e, s)`-RIP with probability
/// `1 − ζ`. Flags, but still returns, projections with `k > d`.
pub fn gen_rip_matrix(
    s: usize,
    d: usize,
    e: f64,
    zeta: f64,
    c: f64,
    rng: &mut RngStream,
) -> Result<RipMatrix> {
    let k = rip_rows(s, d, e, zeta, c)?;
    let mut m = RipMatrix::gaussian(k, d, rng)?;
    m.sparsity = Some(s);
    m.distortion = Some(e);
    Ok(m)
}
