use rand::Rng;

use crate::error::{Error, Result};
use crate::RngStream;

/// `K` linear queries over `{0,1}^d`, each a table of `2^d` values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryWorkload {
    dim: usize,
    tables: Vec<Vec<f64>>,
    names: Vec<String>,
}

/// Largest universe dimension accepted; tables are dense.
const MAX_DIM: usize = 24;

fn check_dim(dim: usize) -> Result<usize> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::param(format!("universe dimension must lie in 1..={MAX_DIM}, got {dim}")));
    }
    Ok(1usize << dim)
}

impl QueryWorkload {
    pub fn new(dim: usize, tables: Vec<Vec<f64>>, names: Vec<String>) -> Result<Self> {
        let cells = check_dim(dim)?;
        if tables.is_empty() {
            return Err(Error::param("workload needs at least one query"));
        }
        if names.len() != tables.len() {
            return Err(Error::param("one name per query is required"));
        }
        for (k, t) in tables.iter().enumerate() {
            if t.len() != cells {
                return Err(Error::data(format!("query {k} has {} entries, need {cells}", t.len())));
            }
            if t.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::data(format!("query {k} has values outside [0, 1]")));
            }
        }
        Ok(Self { dim, tables, names })
    }

    /// Random counting queries: each cell enters each query with probability ½.
    pub fn random_counting(dim: usize, k: usize, rng: &mut RngStream) -> Result<Self> {
        let cells = check_dim(dim)?;
        let tables = (0..k)
            .map(|_| (0..cells).map(|_| if rng.random::<bool>() { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(dim, tables, (0..k).map(|i| format!("q{i}")).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> usize {
        1 << self.dim
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn table(&self, k: usize) -> &[f64] {
        &self.tables[k]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// `⟨q_k, p⟩` for every query.
    pub fn eval_distribution(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.cells() {
            return Err(Error::data(format!("distribution has {} cells, need {}", p.len(), self.cells())));
        }
        Ok(self.tables.iter().map(|t| crate::linalg::dot(t, p)).collect())
    }

    /// `(1/n)·Σ_i q_k(x_i)` for every query.
    pub fn eval_dataset(&self, data: &HistogramDataset) -> Result<Vec<f64>> {
        self.eval_distribution(&data.distribution())
    }

    /// Averages over a list of universe elements.
    pub fn eval_samples(&self, samples: &[usize]) -> Result<Vec<f64>> {
        if samples.is_empty() {
            return Err(Error::data("no samples"));
        }
        if samples.iter().any(|&x| x >= self.cells()) {
            return Err(Error::data("sample outside the universe"));
        }
        let m = samples.len() as f64;
        Ok(self.tables.iter().map(|t| samples.iter().map(|&x| t[x]).sum::<f64>() / m).collect())
    }
}

/// A dataset over `{0,1}^d` stored as cell counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistogramDataset {
    dim: usize,
    counts: Vec<u64>,
    n: u64,
}

impl HistogramDataset {
    pub fn new(dim: usize, counts: Vec<u64>) -> Result<Self> {
        let cells = check_dim(dim)?;
        if counts.len() != cells {
            return Err(Error::data(format!("{} counts for {cells} cells", counts.len())));
        }
        let n = counts.iter().sum();
        if n == 0 {
            return Err(Error::data("dataset is empty"));
        }
        Ok(Self { dim, counts, n })
    }

    pub fn from_records(dim: usize, records: &[usize]) -> Result<Self> {
        let cells = check_dim(dim)?;
        let mut counts = vec![0u64; cells];
        for &r in records {
            if r >= cells {
                return Err(Error::data(format!("record {r} outside the universe")));
            }
            counts[r] += 1;
        }
        Self::new(dim, counts)
    }

    /// `n` records drawn from a random Dirichlet(1)-like skewed distribution.
    pub fn synthetic(dim: usize, n: usize, rng: &mut RngStream) -> Result<Self> {
        let cells = check_dim(dim)?;
        let w: Vec<f64> = (0..cells).map(|_| crate::noise::exp1(rng)).collect();
        let total: f64 = w.iter().sum();
        let table = super::AliasTable::new(&w.iter().map(|v| v / total).collect::<Vec<_>>())?;
        let records: Vec<usize> = (0..n).map(|_| table.sample(rng)).collect();
        Self::from_records(dim, &records)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn distribution(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }
}

pub fn linf_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
