use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::experiments::Experiment;

/// The config file as written: a top-level table with a free-form
/// `[params]` table that the chosen experiment types.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: String,
    seed: Option<u64>,
    #[serde(default = "default_trials")]
    trials: u64,
    out: Option<PathBuf>,
    #[serde(default)]
    params: toml::Table,
}

fn default_trials() -> u64 {
    1
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: Option<u64>,
    pub trials: u64,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub trials: Option<u64>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {}", e.message())))?;
        let experiment = Experiment::from_params(&raw.experiment, raw.params)?;
        if raw.trials == 0 {
            return Err(CliError::Usage("trials must be at least 1".into()));
        }
        Ok(Self { experiment, seed: raw.seed, trials: raw.trials, out: raw.out })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if o.seed.is_some() {
            self.seed = o.seed;
        }
        if o.out.is_some() {
            self.out.clone_from(&o.out);
        }
        if let Some(t) = o.trials {
            self.trials = t;
        }
    }

    /// Canonical JSON of everything that determines the output: experiment,
    /// resolved parameters, seed and trial count. Keys are sorted. The output
    /// path is left out so moving a file does not change its hash.
    pub fn canonical_json(&self) -> String {
        let value = serde_json::json!({
            "experiment": self.experiment.name(),
            "params": self.experiment.params_json(),
            "seed": self.seed,
            "trials": self.trials,
        });
        serde_json::to_string(&value).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_params() {
        let c = ExperimentConfig::parse("experiment = \"figure1\"\nseed = 3\n").unwrap();
        assert_eq!(c.trials, 1);
        assert!(c.canonical_json().contains("\"delta_min\":1e-10"));
    }

    #[test]
    fn unknown_keys_are_usage_errors() {
        let e = ExperimentConfig::parse("experiment = \"figure1\"\nseed = 3\nbogus = 1\n").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = ExperimentConfig::parse("experiment = \"figure1\"\n[params]\nbogus = 1\n").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = ExperimentConfig::parse("experiment = \"nope\"\n").unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn hash_changes_with_every_field() {
        let base = "experiment = \"mode\"\nseed = 1\ntrials = 2\n[params]\neps = 1.0\n";
        let variants = [
            "experiment = \"mode\"\nseed = 2\ntrials = 2\n[params]\neps = 1.0\n",
            "experiment = \"mode\"\nseed = 1\ntrials = 3\n[params]\neps = 1.0\n",
            "experiment = \"mode\"\nseed = 1\ntrials = 2\n[params]\neps = 1.5\n",
            "experiment = \"mode\"\nseed = 1\ntrials = 2\n[params]\neps = 1.0\nuniverse = 128\n",
        ];
        let h0 = ExperimentConfig::parse(base).unwrap().hash();
        let mut seen = std::collections::HashSet::from([h0]);
        for v in variants {
            assert!(seen.insert(ExperimentConfig::parse(v).unwrap().hash()), "{v}");
        }
    }
}
