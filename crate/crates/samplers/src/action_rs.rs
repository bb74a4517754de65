use std::collections::BTreeMap;

use rand::Rng;

use tree_core::{normalized_from_logs, BaseModel, Seq, TreeError};
use value_oracles::ValueOracle;

use crate::error::SamplerError;
use crate::record::RunRecord;
use crate::rejection::rejection_sampling;
use crate::util::sample_from_probs;

/// Per-step law: actions weighted by pi_ref(a|y) V(y a). None when every
/// child is dead, which is where the walker must restart.
pub fn action_level_step_law(
    model: &dyn BaseModel,
    oracle: &dyn ValueOracle,
    prefix: &Seq,
) -> Option<Vec<f64>> {
    let cond = model.conditionals(prefix);
    let logs: Vec<f64> = cond
        .iter()
        .enumerate()
        .map(|(a, &p)| {
            if p > 0.0 {
                p.ln() + oracle.log_value(&prefix.child(a as u32))
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    normalized_from_logs(&logs)
}

/// Decode step by step, each action drawn proportionally to the value-tilted
/// conditionals; a prefix with no live child sends the walker back to the
/// root (one step, one restart).
pub fn action_level_rs<R: Rng>(
    model: &dyn BaseModel,
    oracle: &dyn ValueOracle,
    max_steps: Option<u64>,
    rng: &mut R,
) -> RunRecord {
    let horizon = model.horizon();
    let mut at = Seq::root();
    let mut steps = 0u64;
    let mut restarts = 0u64;
    let mut queries = 0u64;
    loop {
        if at.depth() == horizon {
            return RunRecord::finished(at, horizon, steps, restarts, queries);
        }
        if max_steps.is_some_and(|cap| steps >= cap) {
            return RunRecord::timed_out(at, horizon, steps, restarts, queries);
        }
        queries += model.alphabet_size() as u64;
        match action_level_step_law(model, oracle, &at) {
            Some(law) => {
                let a = sample_from_probs(&law, rng).expect("law is normalized") as u32;
                at.push(a);
            }
            None => {
                at = Seq::root();
                restarts += 1;
            }
        }
        steps += 1;
    }
}

/// Large-alphabet variant: each step runs rejection sampling against the
/// base conditionals with weight g(a) = V(y a), never enumerating the
/// alphabet. `m` bounds sup g / E g per step; `delta` is the per-step
/// accuracy budget. A degenerate step (all sampled weights zero) restarts.
pub fn action_level_rs_large<R: Rng>(
    model: &dyn BaseModel,
    oracle: &dyn ValueOracle,
    m: f64,
    delta: f64,
    max_steps: Option<u64>,
    rng: &mut R,
) -> Result<RunRecord, SamplerError> {
    let horizon = model.horizon();
    let mut at = Seq::root();
    let mut steps = 0u64;
    let mut restarts = 0u64;
    let mut queries = 0u64;
    loop {
        if at.depth() == horizon {
            return Ok(RunRecord::finished(at, horizon, steps, restarts, queries));
        }
        if max_steps.is_some_and(|cap| steps >= cap) {
            return Ok(RunRecord::timed_out(at, horizon, steps, restarts, queries));
        }
        let here = at.clone();
        let outcome = rejection_sampling(
            |r: &mut R| model.sample_action(&here, r),
            |&a| oracle.value(&here.child(a)),
            m,
            delta,
            rng,
        );
        match outcome {
            Ok(out) => {
                queries += out.draws;
                at.push(out.sample);
            }
            Err(SamplerError::DegenerateTilt) => {
                at = Seq::root();
                restarts += 1;
            }
            Err(e) => return Err(e),
        }
        steps += 1;
    }
}

/// Exact law of a single restart-free attempt: the leaf-mass map (normalized)
/// plus the probability the attempt reaches any leaf at all. With restarts,
/// the emitted law is exactly the normalized map.
pub fn action_level_attempt_law(
    model: &dyn BaseModel,
    oracle: &dyn ValueOracle,
    cap: usize,
) -> Result<(BTreeMap<Seq, f64>, f64), TreeError> {
    let horizon = model.horizon();
    let mut leaves = BTreeMap::new();
    let mut success = 0.0;
    let mut count = 0usize;
    let mut stack = vec![(Seq::root(), 1.0f64)];
    while let Some((y, mass)) = stack.pop() {
        if y.depth() == horizon {
            count += 1;
            if count > cap {
                return Err(TreeError::CapExceeded { cap });
            }
            success += mass;
            leaves.insert(y, mass);
            continue;
        }
        if let Some(law) = action_level_step_law(model, oracle, &y) {
            for (a, &p) in law.iter().enumerate() {
                if p > 0.0 {
                    stack.push((y.child(a as u32), mass * p));
                }
            }
        }
    }
    for mass in leaves.values_mut() {
        *mass /= success;
    }
    Ok((leaves, success))
}
