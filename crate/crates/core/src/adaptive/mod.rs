//! Data-dependent mechanisms: propose-test-release, local-sensitivity
//! release, mode release and sufficient-statistics linear regression.

mod adassp;
mod local_sens;
mod mode;
mod ptr;
mod queries;

pub use adassp::{
    adassp, adassp_lambda, adassp_purify_params, pure_adassp, trust_radius, AdaSsp, AdaSspConfig, PureAdaSsp,
    RegressionInstance,
};
pub use local_sens::{local_sens_purify_params, private_local_sensitivity_release, LsRelease};
pub use mode::{mode_ln_inv_delta, mode_release, mode_stats, ModeRelease, ModeStats};
pub use ptr::{ptr, ptr_threshold, pure_ptr, PtrConfig, PtrOutcome, PurePtr};
pub use queries::{BoundedMedian, ScaledHistogram};

use crate::LqBall;

/// A vector-valued query with optional sensitivity oracles.
pub trait QuerySpec {
    type Data: ?Sized;

    fn domain(&self) -> &LqBall;

    fn evaluate(&self, data: &Self::Data) -> crate::Result<Vec<f64>>;

    /// Largest change of the query under replacing one record of `data`.
    fn local_sensitivity(&self, _data: &Self::Data) -> Option<f64> {
        None
    }

    /// Fewest record replacements that reach a dataset whose local
    /// sensitivity exceeds `beta`; `usize::MAX` stands for never.
    fn distance_to_violation(&self, _data: &Self::Data, _beta: f64) -> Option<usize> {
        None
    }

    fn dim(&self) -> usize {
        self.domain().dim()
    }
}
