//! Benchmark tasks: a base model, a tilt, and named value functions bundled
//! together with whatever exact quantities the task admits in closed form.
//!
//! Every closed form registered here is cross-checked against brute-force
//! enumeration in the crate tests, on the largest instance that enumerates
//! comfortably.

mod abc;
mod beam_cx;
mod delayed;
mod dyck;
mod instance;
mod kl_abc;
mod parity;

pub use abc::{abc_task, alrs_marked_step_prob, alrs_tv_exact};
pub use beam_cx::{beam_counterexample_task, beam_reward};
pub use delayed::{delayed_task, uniform_policy_regret};
pub use dyck::{
    dyck_task, dyck_task_custom, dyck_task_with_prompt, DyckModel, DYCK_ALPHABET,
    DYCK_DEFAULT_PROMPT, DYCK_GEOMETRIC_ALPHA,
};
pub use instance::{Fact, TaskError, TaskInstance};
pub use kl_abc::{alrs_regret_enumerated, kl_abc_task};
pub use parity::{parity_task, ParityModel};
