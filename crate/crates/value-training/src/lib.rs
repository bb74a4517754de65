//! Monte-Carlo value regression.
//!
//! Rollouts from the base model are labeled at their leaves, one small MLP
//! per prefix depth regresses those labels, and the stack of nets is
//! assembled into a [`value_oracles::ValueOracle`] that samplers can use in
//! place of a closed form. Training is plain hand-rolled Adam; the nets are
//! small enough that anything fancier would just obscure determinism.

mod mlp;
mod oracle;
mod rollout;
mod train;

pub use mlp::MlpValueNet;
pub use oracle::{assemble_trained_oracle, load_oracle, save_oracle, train_value_oracle, TrainedOracle};
pub use rollout::{generate_rollouts, RolloutDataset, RolloutRecord};
pub use train::{train_value_net, Loss, TrainConfig, TrainError, TrainReport};
