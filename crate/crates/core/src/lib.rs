//! Purification of approximate differential privacy.
//!
//! Converts the output of an `(ε, δ)`-DP mechanism into an `(ε + ε')`-pure-DP
//! output by mixing with the uniform distribution on a bounded `ℓq` ball and
//! adding Laplace noise calibrated to an ∞-Wasserstein bound. The crate also
//! ships the applications built on top of that transform:
//!
//! - [`erm`]: DP-SGD, Laplace noisy gradient descent and purified DP-SGD.
//! - [`frankwolfe`]: approximate-DP Frank-Wolfe, random projections, `ℓ1`
//!   sparse recovery and the purified Frank-Wolfe pipeline.
//! - [`adaptive`]: propose-test-release, local-sensitivity release, mode
//!   release and purified AdaSSP regression.
//! - [`queries`]: MWEM, alias sampling and purified MWEM.
//! - [`audit`]: statistical checks of the distributional claims.
//!
//! Every randomized routine takes an explicit [`RngStream`], so all results
//! are replayable from `(seed, stream)`.

pub mod accounting;
pub mod adaptive;
pub mod audit;
pub mod domain;
pub mod erm;
mod error;
pub mod frankwolfe;
pub mod gaussian;
pub mod linalg;
pub mod noise;
pub mod prob;
pub mod purify;
pub mod queries;
mod rng;

pub use domain::{LqBall, Norm};
pub use error::{Error, Result};
pub use prob::LogProb;
pub use purify::{
    bin_decode, bin_embed, calibrate_delta_w8, folklore_mix, folklore_mix_eps, purify, purify_bits,
    purify_discrete, BitsRelease, DiscreteRelease, PurifyOutput, PurifyParams,
};
pub use rng::RngStream;
