use std::sync::Arc;

use tree_core::{Seq, TiltSpec, UniformModel};
use value_oracles::{ClosedFormOracle, PerturbedOracle};

use crate::instance::TaskInstance;

const MARKED: u32 = 0; // "a"
const AVOID: u32 = 2; // "c"

fn is_live(y: &Seq) -> bool {
    y.actions().iter().all(|&a| a != AVOID)
}

/// ln V(y_{1:h}) = (H - h) ln(2/3) on avoid-free prefixes, -inf otherwise.
fn exact_log_value(horizon: usize, y: &Seq) -> f64 {
    if is_live(y) {
        (horizon - y.depth()) as f64 * (2.0f64 / 3.0).ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Uniform ternary strings tilted by "never emit the last letter".
///
/// `eps_v` marks the value function: every internal prefix ending in the
/// marked letter is overestimated by the factor `1 + eps_v`. Leaves stay
/// exact, so resampling-style algorithms still accept the right set.
pub fn abc_task(horizon: usize, eps_v: f64) -> TaskInstance {
    assert!(horizon >= 1);
    assert!(eps_v >= 0.0);
    let model = Arc::new(UniformModel::new(3, horizon));
    let tilt = TiltSpec::binary(is_live);
    let exact = Arc::new(ClosedFormOracle::new(
        move |y| exact_log_value(horizon, y),
        true,
    ));
    let perturbed = Arc::new(PerturbedOracle::new(
        Arc::clone(&exact),
        eps_v,
        MARKED,
        horizon,
    ));
    TaskInstance::new(format!("abc(h={horizon},eps_v={eps_v})"), model, tilt)
        .with_display(vec!["a".into(), "b".into(), "c".into()])
        .with_oracle("exact", exact)
        .with_oracle("perturbed", perturbed)
        .with_fact(
            "alrs_marked_step_prob",
            alrs_marked_step_prob(eps_v),
            "per-step probability of the marked letter under action-level \
             resampling with the perturbed values, away from the last step",
        )
        .with_fact(
            "alrs_tv",
            alrs_tv_exact(horizon, eps_v),
            "exact TV between the action-level law and the target, reduced \
             to two binomial marked-letter counts",
        )
}

/// Away from the last step, action-level resampling with the perturbed
/// values picks the marked letter with probability (1+eps)/(2+eps).
pub fn alrs_marked_step_prob(eps_v: f64) -> f64 {
    (1.0 + eps_v) / (2.0 + eps_v)
}

/// TV between the action-level sampling law and the target on this task.
///
/// Both laws live on avoid-free strings and are exchangeable given the count
/// of marked letters among the first H-1 positions (the last step compares
/// exact leaf values, hence is fair either way). TV therefore equals the TV
/// between Bin(H-1, (1+eps)/(2+eps)) and Bin(H-1, 1/2).
pub fn alrs_tv_exact(horizon: usize, eps_v: f64) -> f64 {
    let n = horizon - 1;
    let p = alrs_marked_step_prob(eps_v);
    let pmf_p = binomial_pmf(n, p);
    let pmf_half = binomial_pmf(n, 0.5);
    0.5 * pmf_p
        .iter()
        .zip(&pmf_half)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
}

fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    let mut pmf = vec![0.0; n + 1];
    pmf[0] = (1.0 - p).powi(n as i32);
    for k in 0..n {
        pmf[k + 1] = pmf[k] * ((n - k) as f64 / (k + 1) as f64) * (p / (1.0 - p));
    }
    pmf
}
