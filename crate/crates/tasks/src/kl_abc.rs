use std::sync::Arc;

use tree_core::{Seq, TiltSpec, UniformModel};
use value_oracles::ClosedFormOracle;

use crate::instance::TaskInstance;

const MARKED: u32 = 0; // "a"
const AVOID: u32 = 2; // "c"

fn is_live(y: &Seq) -> bool {
    y.actions().iter().all(|&a| a != AVOID)
}

/// V(y_{1:h}) = 1 + (2/3)^{H-h} (e^{1/beta} - 1) on avoid-free prefixes,
/// 1 otherwise. Covers leaves: the factor collapses to e^{1/beta} or 1.
fn exact_log_value(horizon: usize, beta: f64, y: &Seq) -> f64 {
    if is_live(y) {
        let reach = (2.0f64 / 3.0).powi((horizon - y.depth()) as i32);
        (reach * (1.0 / beta).exp_m1()).ln_1p()
    } else {
        0.0
    }
}

/// The avoid-letter task at positive temperature: reward 1 for avoid-free
/// strings, 0 otherwise, tilt exp(r/beta). Every leaf keeps positive mass.
///
/// The perturbed oracle overestimates the soft value by exp(eps_q/beta)
/// whenever the prefix ends in the marked letter, at every depth including
/// leaves: a constant additive error on the log-value scale.
pub fn kl_abc_task(horizon: usize, eps_q: f64, beta: f64) -> TaskInstance {
    assert!(horizon >= 1);
    assert!(eps_q >= 0.0);
    assert!(beta > 0.0);
    let model = Arc::new(UniformModel::new(3, horizon));
    let tilt = TiltSpec::from_reward(
        |y: &Seq| if is_live(y) { 1.0 } else { 0.0 },
        beta,
        1.0,
    );
    let exact = Arc::new(ClosedFormOracle::new(
        move |y| exact_log_value(horizon, beta, y),
        true,
    ));
    let bump = eps_q / beta;
    let q_perturbed = Arc::new(ClosedFormOracle::new(
        move |y| {
            let mark = if y.last() == Some(MARKED) { bump } else { 0.0 };
            exact_log_value(horizon, beta, y) + mark
        },
        false,
    ));
    let mut task = TaskInstance::new(
        format!("kl_abc(h={horizon},eps_q={eps_q},beta={beta})"),
        model,
        tilt,
    )
    .with_display(vec!["a".into(), "b".into(), "c".into()])
    .with_oracle("exact", exact)
    .with_oracle("q_perturbed", q_perturbed);
    if 3usize.checked_pow(horizon as u32).is_some_and(|n| n <= 200_000) {
        task = task.with_fact(
            "alrs_regret",
            alrs_regret_enumerated(horizon, eps_q, beta),
            "beta * KL(action-level law || target), enumerated exactly",
        );
    }
    task
}

/// Exact regret of action-level resampling driven by the perturbed values:
/// beta * KL(pi_hat || target), both laws enumerated leaf by leaf.
pub fn alrs_regret_enumerated(horizon: usize, eps_q: f64, beta: f64) -> f64 {
    let log_third = (1.0f64 / 3.0).ln();
    let bump = eps_q / beta;
    let log_v = |y: &Seq| {
        let mark = if y.last() == Some(MARKED) { bump } else { 0.0 };
        exact_log_value(horizon, beta, y) + mark
    };
    let log_z = exact_log_value(horizon, beta, &Seq::root());

    let mut kl = 0.0;
    let mut stack = vec![(Seq::root(), 0.0f64)];
    while let Some((y, log_p_hat)) = stack.pop() {
        if y.depth() == horizon {
            let r = if is_live(&y) { 1.0 } else { 0.0 };
            let log_target = horizon as f64 * log_third + r / beta - log_z;
            kl += log_p_hat.exp() * (log_p_hat - log_target);
            continue;
        }
        let logs: Vec<f64> = (0..3u32).map(|a| log_v(&y.child(a))).collect();
        let step = tree_core::normalized_from_logs(&logs).expect("all values positive");
        for a in 0..3u32 {
            stack.push((y.child(a), log_p_hat + step[a as usize].ln()));
        }
    }
    beta * kl
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use tree_core::DEFAULT_ENUM_CAP;
    use value_oracles::{exact_oracle, ValueOracle};

    #[test]
    fn closed_form_matches_enumeration() {
        let task = kl_abc_task(4, 0.25, 0.25);
        let table = exact_oracle(task.model().as_ref(), task.tilt(), DEFAULT_ENUM_CAP).unwrap();
        let closed = task.oracle("exact").unwrap();
        for (y, lv) in table.iter() {
            assert_relative_eq!(closed.log_value(y), lv, max_relative = 1e-12);
        }
    }

    #[test]
    fn exact_values_make_the_regret_vanish() {
        assert!(alrs_regret_enumerated(5, 0.0, 0.25).abs() < 1e-12);
    }

    #[test]
    fn regret_is_positive_and_grows_with_horizon() {
        let r4 = alrs_regret_enumerated(4, 0.25, 0.25);
        let r8 = alrs_regret_enumerated(8, 0.25, 0.25);
        assert!(r4 > 0.0, "r4 = {r4}");
        assert!(r8 > r4, "r8 = {r8}, r4 = {r4}");
    }

    /// The perturbed oracle shifts log values by a constant on marked-suffix
    /// nodes everywhere, including leaves.
    #[test]
    fn perturbation_reaches_leaves() {
        let task = kl_abc_task(3, 0.25, 0.25);
        let exact = task.oracle("exact").unwrap();
        let noisy = task.oracle("q_perturbed").unwrap();
        assert!(!noisy.exact_at_leaves());
        let leaf = Seq::from_actions([1, 1, 0]);
        assert_relative_eq!(
            noisy.log_value(&leaf) - exact.log_value(&leaf),
            1.0,
            max_relative = 1e-12
        );
    }
}
