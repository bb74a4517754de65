use rand::Rng;

use tree_core::{q_ref, BaseModel, Seq};
use value_oracles::ValueOracle;

use crate::error::SamplerError;
use crate::record::RunRecord;
use crate::rejection::rejection_sampling;
use crate::util::{sample_from_logs, sample_from_probs};

/// One move of the lazy value-guided walk. With probability 1/2 stay put;
/// otherwise pick a neighbor with weight V(y) on the parent slot (the
/// current node's value, not the parent's) and pi_ref(a|y) V(y a) on child
/// slots. Dead neighborhoods self-loop.
///
/// Returns the next node and the number of oracle evaluations.
pub fn vgb_step<R: Rng>(
    model: &dyn BaseModel,
    oracle: &dyn ValueOracle,
    at: &Seq,
    rng: &mut R,
) -> (Seq, u64) {
    if rng.gen::<f64>() < 0.5 {
        return (at.clone(), 0);
    }
    let mut neighbors = Vec::new();
    let mut logs = Vec::new();
    let mut queries = 0u64;
    if !at.is_root() {
        neighbors.push(at.parent().expect("not root"));
        logs.push(oracle.log_value(at));
        queries += 1;
    }
    if at.depth() < model.horizon() {
        for (a, &p) in model.conditionals(at).iter().enumerate() {
            if p > 0.0 {
                let child = at.child(a as u32);
                logs.push(p.ln() + oracle.log_value(&child));
                neighbors.push(child);
                queries += 1;
            }
        }
    }
    match sample_from_logs(&logs, rng) {
        Some(i) => (neighbors[i].clone(), queries),
        None => (at.clone(), queries),
    }
}

/// Which state of the walk to report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputTime {
    /// The state after all `t_steps` moves.
    Last,
    /// The state at a uniformly random time in 0..t_steps.
    Uniform,
}

/// Run the lazy walk from the root and report one state. The terminal need
/// not be a leaf; callers decide what to do with internal outputs.
pub fn vgb_run<R: Rng>(
    model: &dyn BaseModel,
    oracle: &dyn ValueOracle,
    t_steps: u64,
    output: OutputTime,
    rng: &mut R,
) -> RunRecord {
    let horizon = model.horizon();
    let t_stop = match output {
        OutputTime::Last => t_steps,
        OutputTime::Uniform => rng.gen_range(0..t_steps.max(1)),
    };
    let mut at = Seq::root();
    let mut queries = 0u64;
    for _ in 0..t_stop {
        let (next, q) = vgb_step(model, oracle, &at, rng);
        at = next;
        queries += q;
    }
    RunRecord::finished(at, horizon, t_stop, 0, queries)
}

/// The same move law as `vgb_step`, realized without enumerating the
/// alphabet: neighbors are proposed from the reference kernel (parent with
/// probability 1/2, child a with pi_ref(a|y)/2) and filtered by rejection
/// sampling with weights g(parent) = V(y), g(child) = V(child). `m` bounds
/// sup g / E g under the proposal.
pub fn vgb_step_large<R: Rng>(
    model: &dyn BaseModel,
    oracle: &dyn ValueOracle,
    at: &Seq,
    m: f64,
    delta: f64,
    rng: &mut R,
) -> Result<(Seq, u64), SamplerError> {
    if rng.gen::<f64>() < 0.5 {
        return Ok((at.clone(), 0));
    }
    let proposal = q_ref(model, at);
    let probs: Vec<f64> = proposal.iter().map(|(_, p)| *p).collect();
    let depth = at.depth();
    let outcome = rejection_sampling(
        |r: &mut R| {
            let i = sample_from_probs(&probs, r).expect("proposal is a distribution");
            proposal[i].0.clone()
        },
        |z: &Seq| {
            if z.depth() < depth {
                oracle.value(at)
            } else {
                oracle.value(z)
            }
        },
        m,
        delta,
        rng,
    );
    match outcome {
        Ok(out) => Ok((out.sample, out.draws)),
        // All proposed weights vanished: the walk self-loops.
        Err(SamplerError::DegenerateTilt) => Ok((at.clone(), 0)),
        Err(e) => Err(e),
    }
}

/// Leading constant of the walk-length recipe in `thm_step_count`.
pub const STEP_CONSTANT: f64 = 32.0;

/// Walk length after which the last-iterate leaf conditional is within
/// chi-square `eps` of the stationary one:
///
///   T = 32 k^4 H^2 log(k^2 H / eps'),   eps' = eps / (8 k k_leaf H)^2,
///
/// where `kappa` and `kappa_leaf` bound the oracle's multiplicative error at
/// internal nodes and leaves. The inner deflation of `eps` pays for passing
/// from a chi-square bound on the full state to one on the leaf conditional.
pub fn thm_step_count(kappa: f64, kappa_leaf: f64, horizon: usize, eps: f64) -> u64 {
    assert!(kappa >= 1.0 && kappa_leaf >= 1.0, "error bounds are >= 1");
    assert!(eps > 0.0, "tolerance must be positive");
    let h = horizon as f64;
    let eps_inner = eps / (8.0 * kappa * kappa_leaf * h).powi(2);
    (STEP_CONSTANT * kappa.powi(4) * h * h * (kappa * kappa * h / eps_inner).ln()).ceil() as u64
}
