//! `ℓ1`-constrained private optimization: Frank-Wolfe with noisy vertex
//! selection, Gaussian projections, `ℓ1` sparse recovery and the purified
//! pipeline that ties them together.

mod fw;
mod purified;
mod recovery;
mod rip;
pub mod simplex;

pub use fw::{dp_fw, fw_noise_scale, fw_step, FwOutput};
pub use purified::{purified_fw, purified_fw_sizes, PurifiedFw, PurifiedFwConfig};
pub use recovery::{feasibility_tolerance, sparse_recover, Recovery};
pub use rip::{gen_rip_matrix, rip_rows, rwc_rip_params, RipMatrix};
