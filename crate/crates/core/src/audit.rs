//! Monte Carlo checks of distributional claims: total variation, empirical
//! max divergence, the TV-versus-W∞ tightness pair and the Laplace `ℓ1` tail.

use rand_distr::{Binomial, Distribution};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{ensure_positive, ensure_unit_open, Error, Result};
use crate::noise::laplace;
use crate::{LqBall, Norm, RngStream};

const BOOTSTRAP_ROUNDS: usize = 200;

/// Minimum count per outcome and arm before a probability ratio is trusted.
pub const MIN_COUNT: u64 = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct TrialReport {
    pub estimate: f64,
    pub trials: usize,
    /// Half-width of a 95% confidence interval around `estimate`.
    pub conf_radius: f64,
    pub violated: bool,
}

fn histogram(
    sampler: &mut impl FnMut(&mut RngStream) -> usize,
    outcomes: usize,
    trials: usize,
    rng: &mut RngStream,
) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; outcomes];
    for _ in 0..trials {
        let o = sampler(rng);
        if o >= outcomes {
            return Err(Error::data(format!("sampler emitted {o}, outside 0..{outcomes}")));
        }
        counts[o] += 1;
    }
    Ok(counts)
}

/// Plug-in `½ Σ |p̂ − q̂|` for two count vectors of the same length.
pub fn tv_from_counts(a: &[u64], b: &[u64]) -> f64 {
    let na = a.iter().sum::<u64>().max(1) as f64;
    let nb = b.iter().sum::<u64>().max(1) as f64;
    0.5 * a.iter().zip(b).map(|(&x, &y)| (x as f64 / na - y as f64 / nb).abs()).sum::<f64>()
}

/// Multinomial resample of `counts` by sequential binomials.
fn resample(counts: &[u64], rng: &mut RngStream) -> Vec<u64> {
    let mut left = counts.iter().sum::<u64>();
    let mut mass_left = left as f64;
    let mut out = Vec::with_capacity(counts.len());
    for &c in counts {
        if left == 0 || c == 0 {
            out.push(0);
            mass_left -= c as f64;
            continue;
        }
        let p = (c as f64 / mass_left).min(1.0);
        let draw = Binomial::new(left, p).map(|b| b.sample(rng)).unwrap_or(left);
        out.push(draw);
        left -= draw;
        mass_left -= c as f64;
    }
    out
}

fn l1_dev(a: &[u64], b: &[u64]) -> f64 {
    2.0 * tv_from_counts(a, b)
}

/// Bootstrap radius for the plug-in TV between two histograms.
///
/// `|TV̂ − TV| ≤ ½‖p̂ − p‖₁ + ½‖q̂ − q‖₁`, so the radius is the 95th
/// percentile of the bootstrap version of the right-hand side. This also
/// covers the plug-in's upward bias near zero.
fn tv_bootstrap_radius(a: &[u64], b: &[u64], rng: &mut RngStream) -> f64 {
    let mut devs: Vec<f64> = (0..BOOTSTRAP_ROUNDS)
        .map(|_| 0.5 * (l1_dev(&resample(a, rng), a) + l1_dev(&resample(b, rng), b)))
        .collect();
    devs.sort_by(f64::total_cmp);
    devs[(0.95 * BOOTSTRAP_ROUNDS as f64).ceil() as usize - 1]
}

/// Estimates `TV(P, Q)` for two samplers over `0..outcomes`.
pub fn estimate_tv_discrete(
    mut sampler_p: impl FnMut(&mut RngStream) -> usize,
    mut sampler_q: impl FnMut(&mut RngStream) -> usize,
    outcomes: usize,
    trials: usize,
    rng: &mut RngStream,
) -> Result<TrialReport> {
    if trials == 0 || outcomes == 0 {
        return Err(Error::param("need at least one trial and one outcome"));
    }
    let a = histogram(&mut sampler_p, outcomes, trials, rng)?;
    let b = histogram(&mut sampler_q, outcomes, trials, rng)?;
    Ok(TrialReport {
        estimate: tv_from_counts(&a, &b),
        trials,
        conf_radius: tv_bootstrap_radius(&a, &b, rng),
        violated: false,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxDivergenceReport {
    /// `max ln(p̂_A/p̂_B)` over retained outcomes.
    pub forward: TrialReport,
    /// `max ln(p̂_B/p̂_A)` over retained outcomes.
    pub backward: TrialReport,
    pub min_count: u64,
    pub retained_outcomes: usize,
    /// Empirical mass of outcomes below the count floor, per arm.
    pub excluded_mass: (f64, f64),
    /// Outcomes seen at least `min_count` times in one arm and never in the
    /// other, the signature of additive slack.
    pub one_sided: usize,
    /// One arm put all of its mass on a single outcome and the other did not.
    pub degenerate: bool,
}

impl MaxDivergenceReport {
    pub fn estimate(&self) -> f64 {
        self.forward.estimate.max(self.backward.estimate)
    }

    pub fn conf_radius(&self) -> f64 {
        if self.forward.estimate >= self.backward.estimate {
            self.forward.conf_radius
        } else {
            self.backward.conf_radius
        }
    }

    pub fn violated(&self) -> bool {
        self.forward.violated || self.backward.violated
    }
}

/// Directional `max ln(p̂/q̂)` with a Bonferroni delta-method radius.
fn directional(
    p: &[u64],
    q: &[u64],
    keep: &[usize],
    trials: usize,
    claimed: Option<f64>,
    one_sided: usize,
) -> TrialReport {
    let n = trials as f64;
    if keep.is_empty() {
        return TrialReport { estimate: 0.0, trials, conf_radius: f64::INFINITY, violated: one_sided > 0 };
    }
    let z = Normal::standard().inverse_cdf(1.0 - 0.05 / (2.0 * keep.len() as f64));
    let mut best = (f64::NEG_INFINITY, 0.0);
    for &o in keep {
        let (pp, qq) = (p[o] as f64 / n, q[o] as f64 / n);
        let ratio = (pp / qq).ln();
        if ratio > best.0 {
            let se = ((1.0 - pp) / (n * pp) + (1.0 - qq) / (n * qq)).sqrt();
            best = (ratio, z * se);
        }
    }
    let violated = one_sided > 0 || claimed.is_some_and(|e| best.0 > e + best.1);
    TrialReport { estimate: best.0.max(0.0), trials, conf_radius: best.1, violated }
}

/// Estimates the max divergence between `mech(a)` and `mech(b)` in both
/// directions from `trials` runs per dataset.
///
/// `claimed_eps`, when given, sets `violated` on a direction whose estimate
/// exceeds the claim by more than its confidence radius. Any one-sided
/// outcome also counts as a violation.
pub fn estimate_max_divergence<D: ?Sized>(
    mut mech: impl FnMut(&D, &mut RngStream) -> usize,
    dataset_a: &D,
    dataset_b: &D,
    outcomes: usize,
    trials: usize,
    claimed_eps: Option<f64>,
    rng: &mut RngStream,
) -> Result<MaxDivergenceReport> {
    if trials == 0 || outcomes == 0 {
        return Err(Error::param("need at least one trial and one outcome"));
    }
    let a = histogram(&mut |r: &mut RngStream| mech(dataset_a, r), outcomes, trials, rng)?;
    let b = histogram(&mut |r: &mut RngStream| mech(dataset_b, r), outcomes, trials, rng)?;
    let n = trials as f64;

    let keep: Vec<usize> = (0..outcomes).filter(|&o| a[o] >= MIN_COUNT && b[o] >= MIN_COUNT).collect();
    let mut excluded = (0.0, 0.0);
    for o in (0..outcomes).filter(|o| !keep.contains(o)) {
        excluded.0 += a[o] as f64 / n;
        excluded.1 += b[o] as f64 / n;
    }
    let one_sided_ab = (0..outcomes).filter(|&o| a[o] >= MIN_COUNT && b[o] == 0).count();
    let one_sided_ba = (0..outcomes).filter(|&o| b[o] >= MIN_COUNT && a[o] == 0).count();
    let single = |c: &[u64]| c.iter().filter(|&&x| x > 0).count() == 1;
    let degenerate = single(&a) != single(&b);

    Ok(MaxDivergenceReport {
        forward: directional(&a, &b, &keep, trials, claimed_eps, one_sided_ab),
        backward: directional(&b, &a, &keep, trials, claimed_eps, one_sided_ba),
        min_count: MIN_COUNT,
        retained_outcomes: keep.len(),
        excluded_mass: excluded,
        one_sided: one_sided_ab + one_sided_ba,
        degenerate,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TightnessReport {
    /// TV between the point-mass mixture and the uniform ball, on the grid.
    pub tv: TrialReport,
    /// Largest displacement of the radial coupling over the drawn pairs.
    pub w8_displacement: f64,
    /// Grid lower bound on W∞ from the mass sitting at the origin.
    pub w8_lower_bound: f64,
    /// Radial bin edges on `‖x‖_q`.
    pub grid: Vec<f64>,
    pub grid_step: f64,
}

/// Radial grid `[0, 1e-3, h, 2h, …, 1]` with `h = 1/bins`.
pub fn radial_grid(bins: usize) -> Vec<f64> {
    let h = 1.0 / bins as f64;
    let mut edges = vec![0.0, 1e-3];
    edges.extend((1..=bins).map(|i| i as f64 * h));
    edges
}

fn bin_of(edges: &[f64], r: f64) -> usize {
    // Index of the bin [edges[i], edges[i+1]) holding r; the last bin is closed.
    let i = edges.partition_point(|&e| e <= r);
    i.saturating_sub(1).min(edges.len() - 2)
}

/// The tightness pair on the unit `ℓ2` ball in dimension `d`:
/// `μ = Δ̃^d·δ₀ + (1 − Δ̃^d)·Unif(annulus)` against `ν = Unif(ball)`.
///
/// `μ` is drawn by pushing a `ν` draw `y` through `y ↦ 0` when `‖y‖ < Δ̃`,
/// which is also the coupling whose displacement is reported.
pub fn tightness_check(
    d: usize,
    delta_tilde: f64,
    trials: usize,
    bins: usize,
    rng: &mut RngStream,
) -> Result<TightnessReport> {
    if !(1..=4).contains(&d) {
        return Err(Error::param(format!("tightness check supports 1 <= d <= 4, got {d}")));
    }
    ensure_unit_open("delta_tilde", delta_tilde)?;
    if trials == 0 || bins == 0 {
        return Err(Error::param("need at least one trial and one bin"));
    }
    let ball = LqBall::centered(Norm::L2, d, 1.0)?;
    let grid = radial_grid(bins);
    let nbins = grid.len() - 1;
    let mut mu = vec![0u64; nbins];
    let mut nu = vec![0u64; nbins];
    let mut displacement: f64 = 0.0;
    for _ in 0..trials {
        let y = ball.sample_uniform(rng);
        let r = Norm::L2.of(&y);
        let pushed = if r < delta_tilde { 0.0 } else { r };
        displacement = displacement.max(r - pushed);
        mu[bin_of(&grid, pushed)] += 1;
        let z = ball.sample_uniform(rng);
        nu[bin_of(&grid, Norm::L2.of(&z))] += 1;
    }

    // Moving μ's origin mass needs radius α with ν(B(α)) ≥ μ({0}).
    let n = trials as f64;
    let origin = mu[0] as f64 / n;
    let mut cum = 0.0;
    let mut lower = 0.0;
    for (i, &c) in nu.iter().enumerate() {
        if cum >= origin {
            break;
        }
        lower = grid[i];
        cum += c as f64 / n;
    }
    let w8_lower_bound = (lower - grid[1]).max(0.0);

    let tv = TrialReport {
        estimate: tv_from_counts(&mu, &nu),
        trials,
        conf_radius: tv_bootstrap_radius(&mu, &nu, rng),
        violated: false,
    };
    Ok(TightnessReport {
        tv,
        w8_displacement: displacement,
        w8_lower_bound,
        grid,
        grid_step: 1.0 / bins as f64,
    })
}

/// `2kb + 2b ln(1/ζ)`, exceeded by `‖X‖₁` for `X ~ Lap(b)^k` w.p. at most `ζ`.
pub fn laplace_l1_tail_bound(k: usize, b: f64, zeta: f64) -> f64 {
    2.0 * k as f64 * b + 2.0 * b * (1.0 / zeta).ln()
}

/// Monte Carlo exceedance frequency of the Laplace `ℓ1` tail bound.
pub fn laplace_l1_tail_check(
    k: usize,
    b: f64,
    zeta: f64,
    trials: usize,
    rng: &mut RngStream,
) -> Result<TrialReport> {
    if k == 0 || trials == 0 {
        return Err(Error::param("need k >= 1 and at least one trial"));
    }
    ensure_positive("b", b)?;
    ensure_unit_open("zeta", zeta)?;
    let bound = laplace_l1_tail_bound(k, b, zeta);
    let mut hits = 0usize;
    for _ in 0..trials {
        let s: f64 = (0..k).map(|_| laplace(rng, b).abs()).sum();
        if s > bound {
            hits += 1;
        }
    }
    let n = trials as f64;
    let freq = hits as f64 / n;
    let se_null = (zeta * (1.0 - zeta) / n).sqrt();
    Ok(TrialReport {
        estimate: freq,
        trials,
        conf_radius: 1.96 * (freq * (1.0 - freq) / n).sqrt(),
        violated: freq > zeta + 3.0 * se_null,
    })
}
