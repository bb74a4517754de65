//! Inference-time samplers over generation trees: resampling baselines,
//! value-guided random walks, and selection-style decoders.
//!
//! Conventions shared by every sampler:
//! - a "step" is one action drawn or one walk move; restarts cost one step;
//! - oracle and proposal usage is tallied in `RunRecord::queries`;
//! - hitting a step cap produces a record flagged `timed_out`, not an error.

mod action_rs;
mod beam;
mod block;
mod bon;
mod error;
mod first_leaf;
mod momentum;
mod outcome_rs;
mod record;
mod rejection;
mod util;
mod vgb;

pub use action_rs::{
    action_level_attempt_law, action_level_rs, action_level_rs_large, action_level_step_law,
};
pub use beam::beam_search;
pub use block::{block_bon, block_rs};
pub use bon::{best_of_n, bon_sample_count};
pub use error::SamplerError;
pub use first_leaf::{vgb_first_leaf, ChildSampling};
pub use momentum::vgb_momentum;
pub use outcome_rs::outcome_level_rs;
pub use record::RunRecord;
pub use rejection::{rejection_sampling, RejectionOutcome};
pub use vgb::{thm_step_count, vgb_run, vgb_step, vgb_step_large, OutputTime, STEP_CONSTANT};
