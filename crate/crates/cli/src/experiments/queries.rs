use purify_core::queries::{
    linf_distance, pure_mwem, pure_mwem_sizes, HistogramDataset, PureMwemConfig, QueryWorkload,
};
use purify_core::RngStream;
use serde::{Deserialize, Serialize};

use super::{positive, row, Spec};
use crate::error::CliResult;
use crate::table::Row;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MwemParams {
    pub n: usize,
    pub dim: usize,
    pub queries: usize,
    pub eps: f64,
    pub t_cap: usize,
    pub bit_budget: usize,
}

impl Default for MwemParams {
    fn default() -> Self {
        Self { n: 1000, dim: 4, queries: 10, eps: 1.0, t_cap: 500, bit_budget: 4096 }
    }
}

impl MwemParams {
    fn config(&self) -> PureMwemConfig {
        PureMwemConfig { t_cap: self.t_cap, bit_budget: self.bit_budget, ..Default::default() }
    }
}

impl Spec for MwemParams {
    fn columns(&self) -> Vec<&'static str> {
        vec!["trial", "n", "d", "K", "T", "m", "eps", "linf_error", "stage"]
    }

    fn validate(&self) -> Vec<String> {
        let mut d = Vec::new();
        if self.n == 0 || self.queries == 0 || self.t_cap == 0 {
            d.push("n, queries and t_cap must be positive".into());
        }
        if !(1..=16).contains(&self.dim) {
            d.push("dim must lie in 1..=16".into());
        }
        positive("eps", self.eps, &mut d);
        if d.is_empty() {
            if let Err(e) = pure_mwem_sizes(self.n as u64, self.dim, self.eps, &self.config()) {
                d.push(e.to_string());
            }
        }
        d
    }

    fn trial(&self, trial: u64, rng: &mut RngStream) -> CliResult<Vec<Row>> {
        let w = QueryWorkload::random_counting(self.dim, self.queries, rng)?;
        let data = HistogramDataset::synthetic(self.dim, self.n, rng)?;
        let out = pure_mwem(&data, &w, self.eps, &self.config(), rng)?;
        let truth = w.eval_dataset(&data)?;
        let stages = [
            ("mwem", w.eval_distribution(&out.mwem.distribution())?),
            ("sampled", w.eval_samples(&out.sampled)?),
            ("purified", w.eval_samples(&out.samples)?),
        ];
        Ok(stages
            .into_iter()
            .map(|(stage, v)| {
                row![
                    trial,
                    self.n,
                    self.dim,
                    self.queries,
                    out.sizes.iterations,
                    out.sizes.samples,
                    self.eps,
                    linf_distance(&truth, &v),
                    stage
                ]
            })
            .collect())
    }
}
