use super::{exponential_mechanism, AliasTable, HistogramDataset, QueryWorkload};
use crate::accounting::discrete_delta_threshold_ln;
use crate::error::{ensure_positive, Error, Result};
use crate::noise::laplace;
use crate::purify::purify_bits;
use crate::{LogProb, RngStream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MwemConfig {
    pub iterations: usize,
    /// zCDP budget for the whole run.
    pub rho: f64,
    /// Laplace noise on measurements; off only for testing.
    pub measurement_noise: bool,
    /// Keep every `p_t` in the output.
    pub keep_trace: bool,
}

impl MwemConfig {
    pub fn new(iterations: usize, rho: f64) -> Self {
        Self { iterations, rho, measurement_noise: true, keep_trace: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mwem {
    /// `(n/T)·Σ_{t=1..T} p_t`.
    pub synthetic: Vec<f64>,
    pub selected: Vec<usize>,
    pub measurements: Vec<f64>,
    /// `p_1, …, p_T` when requested.
    pub trace: Vec<Vec<f64>>,
}

impl Mwem {
    /// The synthetic histogram scaled to a probability vector.
    pub fn distribution(&self) -> Vec<f64> {
        let n: f64 = self.synthetic.iter().sum();
        self.synthetic.iter().map(|v| v / n).collect()
    }
}

/// Softmax of log weights with the maximum subtracted.
pub fn normalize_log(log_w: &[f64]) -> Vec<f64> {
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_w.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|v| v / total).collect()
}

/// Multiplicative-weights step `log w(x) += q(x)·(m − q(p))/2`, followed by
/// a shift that keeps the largest log weight at 0.
pub fn mw_update(log_w: &mut [f64], query: &[f64], measurement: f64, estimate: f64) {
    let step = 0.5 * (measurement - estimate);
    for (l, q) in log_w.iter_mut().zip(query) {
        *l += q * step;
    }
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    log_w.iter_mut().for_each(|l| *l -= max);
}

/// MWEM with `ε₀ = √(ρ/T)` per selection and per measurement.
///
/// Per round: one exponential-mechanism draw on `|q(p_{t−1}) − q(D)|` with
/// sensitivity `1/n`, then one Laplace draw of scale `1/(nε₀)`.
pub fn mwem(
    data: &HistogramDataset,
    workload: &QueryWorkload,
    cfg: &MwemConfig,
    rng: &mut RngStream,
) -> Result<Mwem> {
    if cfg.iterations == 0 {
        return Err(Error::param("iterations must be at least 1"));
    }
    ensure_positive("rho", cfg.rho)?;
    if data.dim() != workload.dim() {
        return Err(Error::data("dataset and workload universes differ"));
    }
    let n = data.n() as f64;
    let eps0 = (cfg.rho / cfg.iterations as f64).sqrt();
    let truth = workload.eval_dataset(data)?;
    let cells = workload.cells();
    let mut log_w = vec![0.0; cells];
    let mut p = vec![1.0 / cells as f64; cells];
    let mut avg = vec![0.0; cells];
    let mut out =
        Mwem { synthetic: Vec::new(), selected: Vec::new(), measurements: Vec::new(), trace: Vec::new() };
    for _ in 0..cfg.iterations {
        let est = workload.eval_distribution(&p)?;
        let scores: Vec<f64> = est.iter().zip(&truth).map(|(a, b)| (a - b).abs()).collect();
        let k = exponential_mechanism(&scores, eps0, 1.0 / n, rng)?;
        let noise = laplace(rng, 1.0 / (n * eps0));
        let m = truth[k] + if cfg.measurement_noise { noise } else { 0.0 };
        mw_update(&mut log_w, workload.table(k), m, est[k]);
        p = normalize_log(&log_w);
        avg.iter_mut().zip(&p).for_each(|(a, v)| *a += v);
        out.selected.push(k);
        out.measurements.push(m);
        if cfg.keep_trace {
            out.trace.push(p.clone());
        }
    }
    let scale = n / cfg.iterations as f64;
    out.synthetic = avg.iter().map(|v| v * scale).collect();
    Ok(out)
}

/// Concatenates `d`-bit big-endian blocks.
pub fn encode_tuple(items: &[usize], d: usize) -> Result<Vec<bool>> {
    let mut bits = Vec::with_capacity(items.len() * d);
    for &x in items {
        if d < usize::BITS as usize && x >> d != 0 {
            return Err(Error::param(format!("item {x} does not fit in {d} bits")));
        }
        bits.extend((0..d).rev().map(|b| (x >> b) & 1 == 1));
    }
    Ok(bits)
}

pub fn decode_tuple(bits: &[bool], d: usize) -> Result<Vec<usize>> {
    if d == 0 || !bits.len().is_multiple_of(d) {
        return Err(Error::param("bit length must be a multiple of the block width"));
    }
    Ok(bits.chunks(d).map(|c| c.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureMwemConfig {
    pub t_const: f64,
    pub t_cap: usize,
    pub m_const: f64,
    /// Largest `m·d` accepted.
    pub bit_budget: usize,
}

impl Default for PureMwemConfig {
    fn default() -> Self {
        Self { t_const: 1.0, t_cap: 500, m_const: 1.0, bit_budget: 4096 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureMwemSizes {
    pub iterations: usize,
    pub samples: usize,
    pub bits: usize,
    pub delta: LogProb,
    pub rho: f64,
}

/// `T = ⌈c_T (nε)^{2/3} d^{1/3}⌉` capped, `m = max(1, ⌈c_m (nε)^{2/3} d^{−2/3}⌉)`,
/// `δ` half the identity threshold for `md` bits and `ρ = ε²/(16 ln(1/δ))`.
pub fn pure_mwem_sizes(n: u64, d: usize, eps: f64, cfg: &PureMwemConfig) -> Result<PureMwemSizes> {
    ensure_positive("eps", eps)?;
    ensure_positive("t_const", cfg.t_const)?;
    ensure_positive("m_const", cfg.m_const)?;
    let ne = (n as f64 * eps).powf(2.0 / 3.0);
    let df = d as f64;
    let iterations = ((cfg.t_const * ne * df.cbrt()).ceil() as usize).clamp(1, cfg.t_cap.max(1));
    let samples = ((cfg.m_const * ne / df.powf(2.0 / 3.0)).ceil() as usize).max(1);
    let bits = samples * d;
    if bits > cfg.bit_budget {
        return Err(Error::param(format!(
            "encoding needs {bits} bits, over the budget of {}",
            cfg.bit_budget
        )));
    }
    let delta = LogProb::from_ln(discrete_delta_threshold_ln(bits, eps)? - std::f64::consts::LN_2)?;
    let rho = eps * eps / (16.0 * delta.ln_inv());
    Ok(PureMwemSizes { iterations, samples, bits, delta, rho })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureMwem {
    /// `m` universe elements after purification.
    pub samples: Vec<usize>,
    /// The alias-sampled elements before purification.
    pub sampled: Vec<usize>,
    pub mwem: Mwem,
    pub sizes: PureMwemSizes,
    pub mixed: bool,
}

/// MWEM at `(ε, δ)`, alias-sample `m` records from its synthetic
/// distribution, then purify the `md`-bit encoding. `2ε`-DP overall.
pub fn pure_mwem(
    data: &HistogramDataset,
    workload: &QueryWorkload,
    eps: f64,
    cfg: &PureMwemConfig,
    rng: &mut RngStream,
) -> Result<PureMwem> {
    let d = workload.dim();
    let sizes = pure_mwem_sizes(data.n(), d, eps, cfg)?;
    let run = mwem(data, workload, &MwemConfig::new(sizes.iterations, sizes.rho), rng)?;
    let table = AliasTable::new(&run.distribution())?;
    let sampled: Vec<usize> = (0..sizes.samples).map(|_| table.sample(rng)).collect();
    let release = purify_bits(&encode_tuple(&sampled, d)?, eps, sizes.delta, rng)?;
    let samples = decode_tuple(&release.bits, d)?;
    Ok(PureMwem { samples, sampled, mwem: run, sizes, mixed: release.mixed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::queries::linf_distance;

    #[test]
    fn one_step_tilts_toward_query() {
        let w = QueryWorkload::new(2, vec![vec![0.0, 0.0, 1.0, 1.0]], vec!["hi".into()]).unwrap();
        let cfg = MwemConfig { measurement_noise: false, keep_trace: true, ..MwemConfig::new(1, 1.0) };
        let mut rng = RngStream::new(1, 0);
        // q(D) = 0.9 > q(p₀) = 0.5: mass moves to cells 2, 3.
        let data = HistogramDataset::new(2, vec![1, 0, 4, 5]).unwrap();
        let out = mwem(&data, &w, &cfg, &mut rng).unwrap();
        let p = &out.trace[0];
        let e = (0.5f64 * 0.4).exp();
        let expected =
            [1.0 / (2.0 + 2.0 * e), 1.0 / (2.0 + 2.0 * e), e / (2.0 + 2.0 * e), e / (2.0 + 2.0 * e)];
        for i in 0..4 {
            assert!((p[i] - expected[i]).abs() < 1e-15);
        }
        let low = HistogramDataset::new(2, vec![5, 4, 1, 0]).unwrap();
        let out = mwem(&low, &w, &cfg, &mut rng).unwrap();
        assert!(out.trace[0][0] > 0.25 && out.trace[0][3] < 0.25);
    }

    #[test]
    fn every_iterate_is_a_distribution() {
        let mut rng = RngStream::new(2, 0);
        let w = QueryWorkload::random_counting(5, 20, &mut rng).unwrap();
        let data = HistogramDataset::synthetic(5, 300, &mut rng).unwrap();
        let cfg = MwemConfig { keep_trace: true, ..MwemConfig::new(40, 0.5) };
        let out = mwem(&data, &w, &cfg, &mut rng).unwrap();
        for p in &out.trace {
            assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            assert!(p.iter().all(|v| *v >= 0.0));
        }
        assert!((out.synthetic.iter().sum::<f64>() - 300.0).abs() < 1e-9);
    }

    #[test]
    fn update_is_scale_free() {
        let mut a = vec![0.0, -1.0, 0.3, -2.0];
        let mut b: Vec<f64> = a.iter().map(|v| v + 17.5).collect();
        let q = [0.2, 1.0, 0.0, 0.7];
        mw_update(&mut a, &q, 0.8, 0.4);
        mw_update(&mut b, &q, 0.8, 0.4);
        for (x, y) in normalize_log(&a).iter().zip(normalize_log(&b)) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn tuple_round_trip() {
        let items = [3usize, 15, 0];
        let bits = encode_tuple(&items, 4).unwrap();
        assert_eq!(bits.len(), 12);
        assert_eq!(decode_tuple(&bits, 4).unwrap(), items);
        assert!(encode_tuple(&[16], 4).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let cfg = PureMwemConfig { bit_budget: 10, ..Default::default() };
        assert!(matches!(pure_mwem_sizes(1000, 4, 1.0, &cfg), Err(Error::Parameter(_))));
    }

    #[test]
    fn pure_output_is_valid_and_close_to_sampled() {
        let mut rng = RngStream::new(3, 0);
        let w = QueryWorkload::random_counting(4, 8, &mut rng).unwrap();
        let data = HistogramDataset::synthetic(4, 800, &mut rng).unwrap();
        let out = pure_mwem(&data, &w, 1.0, &PureMwemConfig::default(), &mut rng).unwrap();
        assert_eq!(out.samples.len(), out.sizes.samples);
        assert!(out.samples.iter().all(|&x| x < 16));
        let syn = w.eval_distribution(&out.mwem.distribution()).unwrap();
        let got = w.eval_samples(&out.samples).unwrap();
        let m = out.sizes.samples as f64;
        let bound = 2.0 * ((2.0 * 8.0 * 800.0f64).ln() / (2.0 * m)).sqrt();
        assert!(linf_distance(&syn, &got) <= bound);
    }
}
