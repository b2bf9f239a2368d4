//! Experiment definitions. Each experiment has a typed parameter table with
//! defaults, a fixed column list, a precondition check and a per-trial body.

mod adaptive;
mod basics;
mod erm;
mod queries;

use purify_core::RngStream;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::table::Row;

pub use adaptive::{AdaSspParams, LocalSensParams, ModeParams, PtrParams};
pub use basics::{AuditParams, Figure1Params, PurifyDemoParams, TightnessParams};
pub use erm::{ErmFwParams, ErmSgdParams};
pub use queries::MwemParams;

/// Builds a row from heterogeneous values.
macro_rules! row {
    ($($v:expr),* $(,)?) => {
        vec![$($crate::table::Cell::from($v)),*]
    };
}
pub(crate) use row;

pub trait Spec: Serialize + DeserializeOwned + Default + Sync {
    fn columns(&self) -> Vec<&'static str>;

    /// Violated preconditions, as human-readable diagnostics.
    fn validate(&self) -> Vec<String>;

    fn trial(&self, trial: u64, rng: &mut RngStream) -> CliResult<Vec<Row>>;

    /// Output does not depend on the seed; run a single trial.
    fn deterministic(&self) -> bool {
        false
    }
}

pub(crate) fn positive(name: &str, v: f64, out: &mut Vec<String>) {
    if !(v.is_finite() && v > 0.0) {
        out.push(format!("{name} must be finite and > 0, got {v}"));
    }
}

pub(crate) fn unit_open(name: &str, v: f64, out: &mut Vec<String>) {
    if !(v > 0.0 && v < 1.0) {
        out.push(format!("{name} must lie in (0, 1), got {v}"));
    }
}

macro_rules! experiments {
    ($($variant:ident($params:ty) = $name:literal, $about:literal;)*) => {
        #[derive(Debug, Clone)]
        pub enum Experiment {
            $($variant($params),)*
        }

        /// `(name, description)` of every experiment.
        pub const CATALOG: &[(&str, &str)] = &[$(($name, $about),)*];

        impl Experiment {
            pub fn from_params(name: &str, params: toml::Table) -> CliResult<Self> {
                match name {
                    $($name => Ok(Experiment::$variant(parse_params(name, params)?)),)*
                    other => Err(CliError::Usage(format!(
                        "unknown experiment '{other}' (see `list`)"
                    ))),
                }
            }

            pub fn name(&self) -> &'static str {
                match self {
                    $(Experiment::$variant(_) => $name,)*
                }
            }

            pub fn params_json(&self) -> serde_json::Value {
                match self {
                    $(Experiment::$variant(p) => serde_json::to_value(p).expect("params serialize"),)*
                }
            }

            pub fn columns(&self) -> Vec<&'static str> {
                match self {
                    $(Experiment::$variant(p) => p.columns(),)*
                }
            }

            pub fn validate(&self) -> Vec<String> {
                match self {
                    $(Experiment::$variant(p) => p.validate(),)*
                }
            }

            pub fn deterministic(&self) -> bool {
                match self {
                    $(Experiment::$variant(p) => p.deterministic(),)*
                }
            }

            pub fn trial(&self, trial: u64, rng: &mut RngStream) -> CliResult<Vec<Row>> {
                match self {
                    $(Experiment::$variant(p) => p.trial(trial, rng),)*
                }
            }
        }
    };
}

experiments! {
    Figure1(Figure1Params) = "figure1", "per-coordinate variance of Laplace vs analytic Gaussian over a delta grid";
    Tightness(TightnessParams) = "tightness", "TV and coupling displacement of the ball-cap example";
    PurifyDemo(PurifyDemoParams) = "purify-demo", "purification displacement against its l1 bound";
    ErmSgd(ErmSgdParams) = "erm-sgd", "purified DP-SGD on a synthetic quadratic";
    ErmFw(ErmFwParams) = "erm-fw", "purified Frank-Wolfe on sparse least squares";
    Ptr(PtrParams) = "ptr", "pure propose-test-release for the median";
    LocalSens(LocalSensParams) = "local-sens", "local-sensitivity release of a scaled histogram";
    Mode(ModeParams) = "mode", "stability-based mode release with discrete purification";
    AdaSsp(AdaSspParams) = "adassp", "pure AdaSSP linear regression";
    Mwem(MwemParams) = "mwem", "MWEM and pure MWEM query release";
    Audit(AuditParams) = "audit", "max-divergence audit of discrete purification or folklore mixing";
}

fn parse_params<T: Spec>(name: &str, params: toml::Table) -> CliResult<T> {
    T::deserialize(toml::Value::Table(params))
        .map_err(|e| CliError::Usage(format!("params for '{name}': {}", e.message())))
}
