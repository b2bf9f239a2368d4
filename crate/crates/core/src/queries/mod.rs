//! Linear query release over the universe `{0,1}^d`: the exponential
//! mechanism, multiplicative weights (MWEM), alias sampling and a pure
//! variant of MWEM that purifies a sampled synthetic dataset.

mod alias;
mod expmech;
mod mwem;
mod workload;

pub use alias::{alias_sample, AliasTable};
pub use expmech::exponential_mechanism;
pub use mwem::{
    decode_tuple, encode_tuple, mw_update, mwem, normalize_log, pure_mwem, pure_mwem_sizes, Mwem, MwemConfig,
    PureMwem, PureMwemConfig, PureMwemSizes,
};
pub use workload::{linf_distance, HistogramDataset, QueryWorkload};
