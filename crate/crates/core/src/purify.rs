//! The purification transforms.
//!
//! [`purify`] works on a bounded `ℓq` ball: mix with the uniform distribution
//! with probability `ω`, then add Laplace noise sized to the ∞-Wasserstein
//! bound `Δ`. [`purify_discrete`] and [`purify_bits`] run the same transform on
//! the cube `[0, 1]^d` after a binary embedding of a finite output space, and
//! [`folklore_mix`] is the plain mixing baseline for finite spaces.

use rand::Rng;

use crate::accounting::discrete_delta_threshold_ln;
use crate::error::{ensure_positive, Error, Result};
use crate::noise::laplace;
use crate::{LogProb, LqBall, RngStream};

/// `Δ = 2 d^{1-1/q} R (δ/2ω)^{1/d}` with `R = 2·radius` the ball's diameter.
pub fn calibrate_delta_w8(ball: &LqBall, delta: LogProb, omega: LogProb) -> Result<f64> {
    check_omega(omega)?;
    let d = ball.dim() as f64;
    let root = ((delta.ln() - std::f64::consts::LN_2 - omega.ln()) / d).exp();
    Ok(2.0 * ball.norm().l1_factor(ball.dim()) * ball.diameter() * root)
}

fn check_omega(omega: LogProb) -> Result<()> {
    if omega.ln() < 0.0 {
        Ok(())
    } else {
        Err(Error::param("omega must lie in (0, 1)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurifyParams {
    eps: f64,
    eps_prime: f64,
    delta: LogProb,
    omega: LogProb,
    delta_w8: f64,
}

impl PurifyParams {
    /// `eps` is the upstream mechanism's budget; it only enters reporting.
    pub fn new(ball: &LqBall, eps: f64, eps_prime: f64, delta: LogProb, omega: LogProb) -> Result<Self> {
        ensure_positive("eps", eps)?;
        ensure_positive("eps_prime", eps_prime)?;
        if delta.ln() >= 0.0 {
            return Err(Error::param("delta must lie in (0, 1)"));
        }
        let delta_w8 = calibrate_delta_w8(ball, delta, omega)?;
        if !delta_w8.is_finite() {
            return Err(Error::param(format!("W∞ bound is not finite ({delta_w8})")));
        }
        Ok(Self { eps, eps_prime, delta, omega, delta_w8 })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn eps_prime(&self) -> f64 {
        self.eps_prime
    }

    pub fn delta(&self) -> LogProb {
        self.delta
    }

    pub fn omega(&self) -> LogProb {
        self.omega
    }

    pub fn delta_w8(&self) -> f64 {
        self.delta_w8
    }

    /// Per-coordinate Laplace scale `2Δ/ε'`.
    pub fn laplace_scale(&self) -> f64 {
        2.0 * self.delta_w8 / self.eps_prime
    }

    /// Total privacy of the purified mechanism, `ε + ε'`.
    pub fn pure_eps(&self) -> f64 {
        self.eps + self.eps_prime
    }

    /// Upper bound on `E‖x_pure − x_apx‖₁`:
    /// `ω·d^{1−1/q}R + 4d^{2−1/q}R(δ/2ω)^{1/d}/ε'` with `R` the diameter.
    /// Both `d^{1−1/q}` factors convert `ℓq` lengths to `ℓ1`; they are 1 for
    /// an `ℓ1` ball.
    pub fn l1_error_bound(&self, ball: &LqBall) -> f64 {
        let d = ball.dim() as f64;
        let r = ball.diameter();
        let to_l1 = ball.norm().l1_factor(ball.dim());
        let root = ((self.delta.ln() - std::f64::consts::LN_2 - self.omega.ln()) / d).exp();
        self.omega.value() * to_l1 * r + 4.0 * to_l1 * r * d * root / self.eps_prime
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PurifyOutput {
    pub point: Vec<f64>,
    /// The uniform branch replaced the input.
    pub mixed: bool,
    /// The input lay outside the ball and was projected first.
    pub projected: bool,
}

/// Purifies one output of an `(ε, δ)`-DP mechanism with values in `ball`.
///
/// Draw order is fixed: one uniform for the mixing coin, a ball sample if
/// the coin mixes, then one Laplace draw per coordinate.
pub fn purify(
    x_apx: &[f64],
    ball: &LqBall,
    params: &PurifyParams,
    rng: &mut RngStream,
) -> Result<PurifyOutput> {
    if x_apx.len() != ball.dim() {
        return Err(Error::data(format!("input has dimension {}, ball has {}", x_apx.len(), ball.dim())));
    }
    if x_apx.iter().any(|v| !v.is_finite()) {
        return Err(Error::data("input contains non-finite values"));
    }
    let projected = !ball.contains(x_apx);
    let coin: f64 = rng.random();
    let mixed = coin < params.omega.value();
    let mut point = if mixed {
        ball.sample_uniform(rng)
    } else if projected {
        ball.clip(x_apx)
    } else {
        x_apx.to_vec()
    };
    let scale = params.laplace_scale();
    for v in &mut point {
        *v += laplace(rng, scale);
    }
    Ok(PurifyOutput { point, mixed, projected })
}

/// Big-endian `d`-bit representation of `u`.
pub fn bin_embed(u: u64, d: usize) -> Result<Vec<bool>> {
    if d == 0 || d > 64 {
        return Err(Error::param(format!("bit width must lie in 1..=64, got {d}")));
    }
    if d < 64 && u >> d != 0 {
        return Err(Error::param(format!("index {u} does not fit in {d} bits")));
    }
    Ok((0..d).rev().map(|i| (u >> i) & 1 == 1).collect())
}

pub fn bin_decode(bits: &[bool]) -> Result<u64> {
    if bits.is_empty() || bits.len() > 64 {
        return Err(Error::param(format!("bit width must lie in 1..=64, got {}", bits.len())));
    }
    Ok(bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64))
}

/// Rounds each coordinate to `1(x_i ≥ ½)`.
pub fn round_bits(x: &[f64]) -> Vec<bool> {
    x.iter().map(|&v| v >= 0.5).collect()
}

/// Bit width `⌈log₂ n⌉` of a space with `n ≥ 2` elements.
pub fn bit_width(space_size: u64) -> usize {
    (u64::BITS - (space_size - 1).leading_zeros()) as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct BitsRelease {
    pub bits: Vec<bool>,
    /// `δ` was below the identity-probability threshold.
    pub threshold_ok: bool,
    pub mixed: bool,
}

/// Purifies a bit vector on `[0, 1]^d` with `ω = 2^{-d}` and `ε' = ε`.
///
/// Works for any `d`, so concatenated multi-block encodings can be purified
/// in one call.
pub fn purify_bits(bits: &[bool], eps: f64, delta: LogProb, rng: &mut RngStream) -> Result<BitsRelease> {
    let d = bits.len();
    let cube = LqBall::unit_cube(d)?;
    let omega = LogProb::from_ln(-(d as f64) * std::f64::consts::LN_2)?;
    let params = PurifyParams::new(&cube, eps, eps, delta, omega)?;
    let x: Vec<f64> = bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    let out = purify(&x, &cube, &params, rng)?;
    Ok(BitsRelease {
        bits: round_bits(&out.point),
        threshold_ok: delta.ln() < discrete_delta_threshold_ln(d, eps)?,
        mixed: out.mixed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteRelease {
    pub index: u64,
    pub threshold_ok: bool,
    /// The decoded index fell in the padding beyond the space and became 0.
    pub remapped: bool,
    pub mixed: bool,
}

/// Purifies an index of a finite space of `space_size` elements.
pub fn purify_discrete(
    u_apx: u64,
    space_size: u64,
    eps: f64,
    delta: LogProb,
    rng: &mut RngStream,
) -> Result<DiscreteRelease> {
    if space_size < 2 {
        return Err(Error::param("space size must be at least 2"));
    }
    if u_apx >= space_size {
        return Err(Error::param(format!("index {u_apx} outside space of size {space_size}")));
    }
    let d = bit_width(space_size);
    let release = purify_bits(&bin_embed(u_apx, d)?, eps, delta, rng)?;
    let decoded = bin_decode(&release.bits)?;
    let remapped = decoded >= space_size;
    Ok(DiscreteRelease {
        index: if remapped { 0 } else { decoded },
        threshold_ok: release.threshold_ok,
        remapped,
        mixed: release.mixed,
    })
}

/// `ε + ln(1 + δ|Y|e^{-ε}/ω)`, the pure budget after uniform mixing at level `ω`.
pub fn folklore_mix_eps(space_size: u64, eps: f64, delta: f64, omega: f64) -> Result<f64> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::param(format!("eps must be finite and >= 0, got {eps}")));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::param(format!("delta must lie in [0, 1), got {delta}")));
    }
    if !(omega > 0.0 && omega <= 1.0) {
        return Err(Error::param(format!("omega must lie in (0, 1], got {omega}")));
    }
    if space_size == 0 {
        return Err(Error::param("space size must be positive"));
    }
    Ok(eps + (delta * space_size as f64 * (-eps).exp() / omega).ln_1p())
}

/// With probability `ω` replaces `u_apx` by a uniform index.
pub fn folklore_mix(u_apx: u64, space_size: u64, omega: f64, rng: &mut RngStream) -> Result<u64> {
    if !(omega > 0.0 && omega <= 1.0) {
        return Err(Error::param(format!("omega must lie in (0, 1], got {omega}")));
    }
    if u_apx >= space_size {
        return Err(Error::param(format!("index {u_apx} outside space of size {space_size}")));
    }
    let coin: f64 = rng.random();
    if coin < omega {
        Ok(rng.random_range(0..space_size))
    } else {
        Ok(u_apx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::laplace;
    use crate::Norm;

    fn lp(p: f64) -> LogProb {
        LogProb::new(p).unwrap()
    }

    #[test]
    fn delta_w8_collapses_at_two_omega() {
        let ball = LqBall::centered(Norm::L2, 1, 0.5).unwrap();
        let v = calibrate_delta_w8(&ball, lp(0.5), lp(0.25)).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
    }

    #[test]
    fn delta_w8_plug_in() {
        let ball = LqBall::centered(Norm::L1, 2, 1.5).unwrap();
        let v = calibrate_delta_w8(&ball, lp(2e-8), lp(1e-2)).unwrap();
        assert!((v - 6e-3).abs() < 1e-12 * 6e-3);
    }

    #[test]
    fn delta_w8_survives_tiny_delta() {
        let ball = LqBall::centered(Norm::L2, 64, 1.0).unwrap();
        let v = calibrate_delta_w8(&ball, lp(1e-300), lp(0.5)).unwrap();
        // ln Δ = ln 2 + ½ ln 64 + ln 2 + ln(1e-300)/64.
        let ln_expected = 2.0 * 2f64.ln() + 0.5 * 64f64.ln() - 300.0 * 10f64.ln() / 64.0;
        assert!(v.is_finite() && v > 0.0);
        assert!((v.ln() - ln_expected).abs() < 1e-12);

        let far = LogProb::from_ln(-20_000.0).unwrap();
        let v = calibrate_delta_w8(&ball, far, lp(0.5)).unwrap();
        assert!(v > 0.0 && v.is_finite());
    }

    #[test]
    fn delta_w8_monotone_on_grid() {
        let deltas = [1e-12, 1e-9, 1e-6, 1e-4, 1e-3];
        let omegas = [1e-3, 1e-2, 0.1, 0.5];
        let radii = [0.1, 0.5, 1.0, 3.0];
        for norm in [Norm::L1, Norm::L2, Norm::Linf] {
            for d in [1, 3, 10] {
                for &r in &radii {
                    let ball = LqBall::centered(norm, d, r).unwrap();
                    for &w in &omegas {
                        let vals: Vec<f64> = deltas
                            .iter()
                            .map(|&dl| calibrate_delta_w8(&ball, lp(dl), lp(w)).unwrap())
                            .collect();
                        assert!(vals.windows(2).all(|p| p[0] < p[1]));
                    }
                    for &dl in &deltas {
                        let vals: Vec<f64> = omegas
                            .iter()
                            .map(|&w| calibrate_delta_w8(&ball, lp(dl), lp(w)).unwrap())
                            .collect();
                        assert!(vals.windows(2).all(|p| p[0] > p[1]));
                    }
                }
                let by_radius: Vec<f64> = radii
                    .iter()
                    .map(|&r| {
                        let ball = LqBall::centered(norm, d, r).unwrap();
                        calibrate_delta_w8(&ball, lp(1e-6), lp(0.01)).unwrap()
                    })
                    .collect();
                assert!(by_radius.windows(2).all(|p| p[0] < p[1]));
            }
        }
    }

    #[test]
    fn rejects_bad_omega() {
        let ball = LqBall::centered(Norm::L2, 2, 1.0).unwrap();
        assert!(calibrate_delta_w8(&ball, lp(1e-6), lp(1.0)).is_err());
        assert!(PurifyParams::new(&ball, 1.0, 0.0, lp(1e-6), lp(0.1)).is_err());
        assert!(PurifyParams::new(&ball, 1.0, 1.0, lp(1.0), lp(0.1)).is_err());
    }

    #[test]
    fn non_mix_branch_adds_exact_laplace() {
        let ball = LqBall::centered(Norm::L2, 3, 1.0).unwrap();
        let omega = LogProb::from_ln(-800.0).unwrap();
        let params = PurifyParams::new(&ball, 1.0, 0.5, lp(1e-10), omega).unwrap();
        let x = [0.2, -0.1, 0.4];
        for seed in 0..20 {
            let mut rng = RngStream::new(seed, 0);
            let mut replay = rng.clone();
            let out = purify(&x, &ball, &params, &mut rng).unwrap();
            assert!(!out.mixed && !out.projected);
            let _coin: f64 = replay.random();
            for (i, v) in out.point.iter().enumerate() {
                let z = laplace(&mut replay, params.laplace_scale());
                assert_eq!(*v, x[i] + z);
            }
        }
    }

    #[test]
    fn outside_input_is_projected_and_flagged() {
        let ball = LqBall::centered(Norm::L2, 2, 1.0).unwrap();
        let omega = LogProb::from_ln(-800.0).unwrap();
        let params = PurifyParams::new(&ball, 1.0, 1.0, lp(1e-10), omega).unwrap();
        let mut rng = RngStream::new(1, 0);
        let mut replay = rng.clone();
        let out = purify(&[3.0, 4.0], &ball, &params, &mut rng).unwrap();
        assert!(out.projected);
        let _coin: f64 = replay.random();
        let z0 = laplace(&mut replay, params.laplace_scale());
        assert!((out.point[0] - (0.6 + z0)).abs() < 1e-12);
    }

    #[test]
    fn mean_abs_deviation_matches_scale() {
        let ball = LqBall::centered(Norm::L2, 2, 1.0).unwrap();
        let params = PurifyParams::new(&ball, 1.0, 1.0, lp(1e-12), lp(1e-2)).unwrap();
        let b = params.laplace_scale();
        let mut rng = RngStream::new(21, 0);
        let n = 100_000;
        let x = [0.3, -0.3];
        let mut devs = Vec::with_capacity(n);
        for _ in 0..n {
            let out = purify(&x, &ball, &params, &mut rng).unwrap();
            if !out.mixed {
                devs.push((out.point[0] - x[0]).abs());
            }
        }
        let m = devs.len() as f64;
        let mean = devs.iter().sum::<f64>() / m;
        // |Lap(b)| ~ Exp(b): sd b.
        let se = b / m.sqrt();
        assert!((mean - b).abs() < 3.0 * se, "{mean} vs {b}");
    }

    #[test]
    fn embed_examples() {
        assert_eq!(bin_embed(5, 3).unwrap(), vec![true, false, true]);
        assert_eq!(bin_embed(0, 7).unwrap(), vec![false; 7]);
        assert!(bin_embed(8, 3).is_err());
        assert_eq!(bin_embed(u64::MAX, 64).unwrap(), vec![true; 64]);
    }

    #[test]
    fn embed_round_trip_exhaustive() {
        for d in 1..=12 {
            for u in 0..(1u64 << d) {
                assert_eq!(bin_decode(&bin_embed(u, d).unwrap()).unwrap(), u);
            }
        }
    }

    #[test]
    fn rounding_ties_go_up() {
        assert_eq!(round_bits(&[0.6, 0.4, 0.5]), vec![true, false, true]);
    }

    #[test]
    fn bit_widths() {
        assert_eq!(bit_width(2), 1);
        assert_eq!(bit_width(3), 2);
        assert_eq!(bit_width(256), 8);
        assert_eq!(bit_width(257), 9);
    }

    #[test]
    fn folklore_examples() {
        assert_eq!(folklore_mix_eps(10, 0.7, 0.0, 0.3).unwrap(), 0.7);
        let e = folklore_mix_eps(1024, 1.0, 1e-6, 0.01).unwrap();
        let expected = 1.0 + (1.0 + 0.1024 * (-1.0f64).exp()).ln();
        assert!((e - expected).abs() < 1e-14);
        assert!((e - 1.0370).abs() < 1e-4);
    }

    #[test]
    fn full_mixing_ignores_input() {
        let mut rng = RngStream::new(2, 0);
        let n = 40_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            counts[folklore_mix(3, 4, 1.0, &mut rng).unwrap() as usize] += 1;
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 0.25).abs() < 0.01);
        }
    }

    #[test]
    fn discrete_flags_threshold() {
        let mut rng = RngStream::new(3, 0);
        let r = purify_discrete(5, 8, 1.0, lp(0.01), &mut rng).unwrap();
        assert!(!r.threshold_ok);
        let r = purify_discrete(5, 8, 1.0, lp(1e-8), &mut rng).unwrap();
        assert!(r.threshold_ok);
        assert!(purify_discrete(8, 8, 1.0, lp(1e-8), &mut rng).is_err());
    }
}
