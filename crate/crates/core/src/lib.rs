//! Yaw-angle representations for vehicle orientation regression.
//!
//! The crate covers the full path from a KITTI label to an accuracy number:
//!
//! - [`angle`]: canonical `[-π, π)` angles, circular arithmetic and the
//!   alpha / rotation_y conversion.
//! - [`repr`]: encode/decode codecs for scalar, Single Bin, Multibin,
//!   Confidence Bins, Voting Bins and Tricosine representations.
//! - [`loss`]: L2, angular and Multibin losses with analytic gradients.
//! - [`metrics`]: Orientation Similarity.
//! - [`kitti`]: KITTI object label reading and writing.
//! - [`analysis`]: brute-force decoding oracle, loss-landscape sweeps,
//!   gradient-descent fits and noise simulation.

pub mod analysis;
pub mod angle;
mod error;
pub mod kitti;
pub mod loss;
pub mod metrics;
pub mod repr;

pub use angle::{
    alpha_to_roty, circular_diff, circular_mean, denormalize_scalar, normalize_scalar,
    roty_to_alpha, wrap, Angle, ObjectLocation,
};
pub use error::{OrientError, Result};
pub use loss::{LossKind, LossReport};
pub use metrics::{orientation_similarity, EvalBatch};
pub use repr::{canonicalize, decode, encode, ReprKind, ReprScheme, ReprVector};
