use std::collections::HashMap;

use crate::error::{ensure_positive, Error, Result};
use crate::noise::laplace;
use crate::purify::{bit_width, purify_discrete};
use crate::{LogProb, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeStats {
    /// Most frequent item; ties go to the smallest index.
    pub mode: u64,
    pub occ1: usize,
    pub occ2: usize,
    /// `⌈(occ1 − occ2)/2⌉`, the replacements needed to make the mode change.
    pub gap: usize,
}

/// Counts items in one pass and reports the two largest counts.
pub fn mode_stats(data: &[u64], universe_size: u64) -> Result<ModeStats> {
    if data.is_empty() {
        return Err(Error::data("dataset is empty"));
    }
    let mut counts: HashMap<u64, usize> = HashMap::new();
    for &x in data {
        if x >= universe_size {
            return Err(Error::data(format!("item {x} outside universe of size {universe_size}")));
        }
        *counts.entry(x).or_default() += 1;
    }
    let (mut mode, mut occ1, mut occ2) = (0u64, 0usize, 0usize);
    for (&item, &c) in &counts {
        if c > occ1 || (c == occ1 && item < mode) {
            occ2 = occ2.max(occ1);
            mode = item;
            occ1 = c;
        } else {
            occ2 = occ2.max(c);
        }
    }
    Ok(ModeStats { mode, occ1, occ2, gap: (occ1 - occ2).div_ceil(2) })
}

/// `ln(1/δ) = d·ln(2d³/ε)` with `d = ⌈log₂|X|⌉`.
pub fn mode_ln_inv_delta(universe_size: u64, eps: f64) -> Result<f64> {
    ensure_positive("eps", eps)?;
    if universe_size < 2 {
        return Err(Error::param("universe must have at least 2 items"));
    }
    let d = bit_width(universe_size) as f64;
    Ok(d * (2.0 * d.powi(3) / eps).ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeRelease {
    pub item: u64,
    /// The stability test failed; the placeholder index 0 was purified.
    pub bottom: bool,
    pub stats: ModeStats,
    pub noisy_gap: f64,
    pub threshold_ok: bool,
    pub mixed: bool,
}

/// Stability-based mode release followed by discrete purification.
///
/// Tests `gap − 1 + Lap(1/ε) > ln(1/δ)/ε`; on failure the ⊥ output is
/// represented by index 0 so it can go through the same bit embedding.
pub fn mode_release(data: &[u64], universe_size: u64, eps: f64, rng: &mut RngStream) -> Result<ModeRelease> {
    let ln_inv = mode_ln_inv_delta(universe_size, eps)?;
    let stats = mode_stats(data, universe_size)?;
    let noisy_gap = stats.gap as f64 - 1.0 + laplace(rng, 1.0 / eps);
    let bottom = noisy_gap <= ln_inv / eps;
    let apx = if bottom { 0 } else { stats.mode };
    let delta = LogProb::from_ln(-ln_inv)?;
    let rel = purify_discrete(apx, universe_size, eps, delta, rng)?;
    Ok(ModeRelease {
        item: rel.index,
        bottom,
        stats,
        noisy_gap,
        threshold_ok: rel.threshold_ok,
        mixed: rel.mixed,
    })
}
