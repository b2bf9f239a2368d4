use rand::Rng;

use crate::error::{Error, Result};
use crate::RngStream;

/// Walker's alias table, built with Vose's stack method.
#[derive(Debug, Clone, PartialEq)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<usize>,
    /// Cells finalized during construction; equals the table size.
    build_steps: usize,
}

impl AliasTable {
    /// `p` must be nonnegative and sum to 1 within `1e-9`; it is renormalized.
    pub fn new(p: &[f64]) -> Result<Self> {
        let n = p.len();
        if n == 0 {
            return Err(Error::data("distribution is empty"));
        }
        if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::data("distribution has negative or non-finite mass"));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::data(format!("distribution sums to {total}")));
        }
        let nf = n as f64;
        let mut scaled: Vec<f64> = p.iter().map(|v| v * nf / total).collect();
        let mut prob = vec![1.0; n];
        let mut alias: Vec<usize> = (0..n).collect();
        let (mut small, mut large): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| scaled[i] < 1.0);
        let mut build_steps = 0;
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            prob[s] = scaled[s];
            alias[s] = l;
            build_steps += 1;
            scaled[l] -= 1.0 - scaled[s];
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers are 1 up to rounding.
        for i in large.into_iter().chain(small) {
            prob[i] = 1.0;
            build_steps += 1;
        }
        Ok(Self { prob, alias, build_steps })
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    pub fn build_steps(&self) -> usize {
        self.build_steps
    }

    /// One index from two uniforms.
    pub fn sample(&self, rng: &mut RngStream) -> usize {
        let i = rng.random_range(0..self.prob.len());
        if rng.random::<f64>() < self.prob[i] {
            i
        } else {
            self.alias[i]
        }
    }

    /// The distribution the table encodes.
    pub fn probabilities(&self) -> Vec<f64> {
        let n = self.prob.len() as f64;
        let mut p: Vec<f64> = self.prob.iter().map(|v| v / n).collect();
        for (i, &a) in self.alias.iter().enumerate() {
            if a != i {
                p[a] += (1.0 - self.prob[i]) / n;
            }
        }
        p
    }
}

/// `m` i.i.d. draws from `p`.
pub fn alias_sample(p: &[f64], m: usize, rng: &mut RngStream) -> Result<Vec<usize>> {
    let table = AliasTable::new(p)?;
    Ok((0..m).map(|_| table.sample(rng)).collect())
}
