use std::sync::Arc;

use tree_core::{Seq, TiltSpec, UniformModel};
use value_oracles::ClosedFormOracle;

use crate::instance::TaskInstance;

/// Reward of a full string: 1 when the first bit is 0 and the entire second
/// half is 0; a consolation 2^(1-H/2) whenever the first bit is 1; else 0.
pub fn beam_reward(horizon: usize, y: &Seq) -> f64 {
    let bits = y.actions();
    match bits[0] {
        1 => 2f64.powi(1 - (horizon / 2) as i32),
        _ if bits[horizon / 2..].iter().all(|&b| b == 0) => 1.0,
        _ => 0.0,
    }
}

/// E[r | prefix]: constant on each first-bit branch until the second half
/// starts resolving.
fn exact_log_value(horizon: usize, y: &Seq) -> f64 {
    let half = horizon / 2;
    let ln2 = std::f64::consts::LN_2;
    let bits = y.actions();
    if bits.is_empty() {
        return (3.0f64).ln() - (half as f64 + 1.0) * ln2;
    }
    if bits[0] == 1 {
        return (1.0 - half as f64) * ln2;
    }
    if bits[half.min(bits.len())..].iter().any(|&b| b != 0) {
        return f64::NEG_INFINITY;
    }
    // Unresolved second-half positions, each a fair bit that must be 0.
    -((horizon - half.max(bits.len())) as f64) * ln2
}

/// Fair coin flips with the raw reward as tilt. The high-reward strings hide
/// behind a first half that looks worthless step by step, so width-limited
/// lookahead keeps only the consolation branch.
pub fn beam_counterexample_task(horizon: usize) -> TaskInstance {
    assert!(horizon >= 4 && horizon % 2 == 0);
    let model = Arc::new(UniformModel::new(2, horizon));
    let tilt = TiltSpec::from_log_fn(move |y: &Seq| beam_reward(horizon, y).ln());
    let exact = Arc::new(ClosedFormOracle::new(
        move |y| exact_log_value(horizon, y),
        true,
    ));
    let half = horizon / 2;
    TaskInstance::new(format!("beam_cx(h={horizon})"), model, tilt)
        .with_oracle("exact", exact)
        .with_fact(
            "reward_one_mass",
            1.0 / 3.0,
            "target mass of the reward-1 strings; exactly 1/3 at every \
             horizon because the two branches contribute masses 1:2",
        )
        .with_fact(
            "expected_reward",
            (1.0 + 2f64.powi(2 - half as i32)) / 3.0,
            "reward under the target, (1 + 2^(2-H/2))/3",
        )
}
