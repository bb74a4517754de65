use std::f64::consts::E;
use std::sync::Arc;

use tree_core::{Seq, TiltSpec, UniformModel};
use value_oracles::{ClosedFormOracle, DelayedOracle};

use crate::instance::TaskInstance;

fn bit_sum(y: &Seq) -> f64 {
    y.actions().iter().map(|&a| a as f64).sum()
}

/// ln V(y_{1:h}) = (H - h) ln((1+e)/2) + sum_{k<=h} y_k.
fn exact_log_value(horizon: usize, y: &Seq) -> f64 {
    (horizon - y.depth()) as f64 * ((1.0 + E) / 2.0).ln() + bit_sum(y)
}

/// Fair coin flips rewarded by their mean, at temperature 1/H, so the tilt
/// is exp(sum of bits). The interesting oracle is one step stale: it reports
/// the parent's value, which is the same for both children and therefore
/// carries no signal for per-step reweighting.
pub fn delayed_task(horizon: usize) -> TaskInstance {
    assert!(horizon >= 1);
    let model = Arc::new(UniformModel::new(2, horizon));
    let beta = 1.0 / horizon as f64;
    let tilt = TiltSpec::from_reward(
        move |y: &Seq| bit_sum(y) / horizon as f64,
        beta,
        1.0,
    );
    let exact = Arc::new(ClosedFormOracle::new(
        move |y| exact_log_value(horizon, y),
        true,
    ));
    let delayed = Arc::new(DelayedOracle::new(Arc::clone(&exact)));
    TaskInstance::new(format!("delayed(h={horizon})"), model, tilt)
        .with_oracle("exact", exact)
        .with_oracle("delayed", delayed)
        .with_fact(
            "uniform_policy_regret",
            uniform_policy_regret(),
            "beta * KL(uniform || target); horizon-independent because the \
             per-step KL is constant and beta = 1/H",
        )
}

/// beta * KL(pi_ref || target) = ln((1+e)/2) - 1/2 at every horizon.
pub fn uniform_policy_regret() -> f64 {
    ((1.0 + E) / 2.0).ln() - 0.5
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use tree_core::DEFAULT_ENUM_CAP;
    use value_oracles::{exact_oracle, ValueOracle};

    #[test]
    fn closed_form_matches_enumeration() {
        let task = delayed_task(4);
        let table = exact_oracle(task.model().as_ref(), task.tilt(), DEFAULT_ENUM_CAP).unwrap();
        let closed = task.oracle("exact").unwrap();
        for (y, lv) in table.iter() {
            assert_relative_eq!(closed.log_value(y), lv, max_relative = 1e-12);
        }
    }

    #[test]
    fn delayed_oracle_is_blind_to_the_last_action() {
        let task = delayed_task(5);
        let delayed = task.oracle("delayed").unwrap();
        let y = Seq::from_actions([1, 0]);
        assert_eq!(delayed.log_value(&y.child(0)), delayed.log_value(&y.child(1)));
        assert!(!delayed.exact_at_leaves());
    }

    /// The regret constant is beta * KL(pi_ref || target), checked here by
    /// direct enumeration at two horizons.
    #[test]
    fn regret_constant_matches_enumeration() {
        for h in [4usize, 6] {
            let task = delayed_task(h);
            let target = task.target(DEFAULT_ENUM_CAP).unwrap();
            let uniform = 0.5f64.powi(h as i32);
            let kl: f64 = target
                .as_map()
                .keys()
                .map(|y| uniform * (uniform.ln() - target.prob(y).ln()))
                .sum();
            assert_relative_eq!(kl / h as f64, uniform_policy_regret(), epsilon = 1e-9);
        }
    }
}
