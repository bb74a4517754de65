//! Core types for autoregressive generation trees.
//!
//! A generation instance is a rooted tree of depth `H` over an integer
//! alphabet: nodes are action sequences `y_{1:h}`, the root is the empty
//! sequence, and leaves sit at depth `H`. A [`BaseModel`] assigns conditional
//! next-action laws to every internal node; a [`TiltSpec`] reweights leaves by
//! a nonnegative function `tau`. The induced target law over leaves is
//! `pi*(y) ∝ pi_ref(y) * tau(y)`, materialized by [`exact_target`] on
//! instances small enough to enumerate.
//!
//! All path densities and values are carried in log space; per-node
//! distributions are exponentiated only after subtracting the max log weight.

mod error;
mod logs;
mod model;
mod seq;
mod target;
mod tilt;

pub use error::TreeError;
pub use logs::{logsumexp, normalized_from_logs};
pub use model::{neighborhood, path_log_density, q_ref, BaseModel, FnModel, UniformModel};
pub use seq::Seq;
pub use target::{exact_target, TargetDist, DEFAULT_ENUM_CAP};
pub use tilt::{RewardForm, TiltSpec};
