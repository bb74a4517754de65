use rand::Rng;

use tree_core::{logsumexp, BaseModel, Seq};
use value_oracles::ValueOracle;

use crate::record::RunRecord;
use crate::util::{sample_from_logs, sample_from_probs};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dir {
    Down,
    Up,
}

/// Momentum-lifted first-leaf walk. Each node splits into a downward and an
/// upward copy and the unlifted chain's edge flows are routed to cancel
/// opposing traffic: a walker keeps its direction unless the local flow
/// imbalance forces a turn. With B = V(y) (arrival flow scale) and
/// C = sum_a pi_ref(a|y) V(y a):
///
///   arrived down, C >= B: continue down, child a w.p. f_a / C;
///   arrived down, C <  B: child a w.p. f_a / B, bounce up w.p. (B-C)/B;
///   arrived up,   C >= B: keep rising w.p. B/C, else turn down into a;
///   arrived up,   C <  B: keep rising surely.
///
/// The root reflects, and the walk stops at the first leaf. For exact
/// one-step-consistent values C = B everywhere, so the walk shoots straight
/// down and emits an exact target draw in H moves.
pub fn vgb_momentum<R: Rng>(
    model: &dyn BaseModel,
    oracle: &dyn ValueOracle,
    step_cap: u64,
    rng: &mut R,
) -> RunRecord {
    let horizon = model.horizon();
    let mut at = Seq::root();
    let mut dir = Dir::Down;
    let mut steps = 0u64;
    let mut queries = 0u64;
    loop {
        if at.depth() == horizon {
            return RunRecord::finished(at, horizon, steps, 0, queries);
        }
        if steps >= step_cap {
            return RunRecord::timed_out(at, horizon, steps, 0, queries);
        }
        steps += 1;

        let cond = model.conditionals(&at);
        let mut children = Vec::new();
        let mut logs_f = Vec::new();
        for (a, &p) in cond.iter().enumerate() {
            if p > 0.0 {
                let child = at.child(a as u32);
                logs_f.push(p.ln() + oracle.log_value(&child));
                children.push(child);
                queries += 1;
            }
        }
        let log_c = logsumexp(&logs_f);

        if at.is_root() {
            if let Some(i) = sample_from_logs(&logs_f, rng) {
                at = children.swap_remove(i);
                dir = Dir::Down;
            }
            continue;
        }

        let log_b = oracle.log_value(&at);
        queries += 1;
        match dir {
            Dir::Down if log_c >= log_b => {
                if let Some(i) = sample_from_logs(&logs_f, rng) {
                    at = children.swap_remove(i);
                }
            }
            Dir::Down => {
                // Weights relative to B: children exp(log f_a - log_b),
                // parent 1 - C/B; all within [0, 1].
                let mut probs: Vec<f64> =
                    logs_f.iter().map(|&lf| (lf - log_b).exp()).collect();
                probs.push(1.0 - (log_c - log_b).exp());
                let i = sample_from_probs(&probs, rng).expect("B > 0 off the root");
                if i < children.len() {
                    at = children.swap_remove(i);
                } else {
                    at = at.parent().expect("not root");
                    dir = Dir::Up;
                }
            }
            Dir::Up if log_c >= log_b => {
                let p_up = (log_b - log_c).exp();
                if rng.gen::<f64>() < p_up {
                    at = at.parent().expect("not root");
                } else if let Some(i) = sample_from_logs(&logs_f, rng) {
                    at = children.swap_remove(i);
                    dir = Dir::Down;
                } else {
                    at = at.parent().expect("not root");
                }
            }
            Dir::Up => {
                at = at.parent().expect("not root");
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use tasks::{abc_task, dyck_task};
    use tree_core::DEFAULT_ENUM_CAP;
    use crate::first_leaf::{vgb_first_leaf, ChildSampling};

    /// Exact values: ballistic descent, an exact target sample in H moves.
    #[test]
    fn exact_values_descend_ballistically() {
        let task = abc_task(4, 0.0);
        let model = task.model();
        let oracle = task.oracle("exact").unwrap();
        let target = task.target(DEFAULT_ENUM_CAP).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut emp = metrics::EmpiricalDist::new();
        for _ in 0..4000 {
            let rec = vgb_momentum(model.as_ref(), oracle.as_ref(), 10_000, &mut rng);
            assert_eq!(rec.steps, 4);
            emp.push_leaf(rec.terminal);
        }
        assert!(metrics::tv(&emp.pmf(), target.as_map()) < 0.04);
    }

    /// Under a crude geometric value the lifted walk still reaches leaves,
    /// and does so in far fewer moves than the diffusive one.
    #[test]
    fn beats_the_diffusive_walk_under_crude_values() {
        let task = dyck_task(8, 0.35, 0.1).unwrap();
        let model = task.model();
        let oracle = task.oracle("geometric").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let mut momentum_steps = 0.0;
        let mut diffusive_steps = 0.0;
        let n = 400;
        for _ in 0..n {
            let rec = vgb_momentum(model.as_ref(), oracle.as_ref(), 100_000, &mut rng);
            assert!(rec.is_leaf);
            momentum_steps += rec.steps as f64;
            let rec = vgb_first_leaf(
                model.as_ref(),
                oracle.as_ref(),
                ChildSampling::Enumerate,
                100_000,
                &mut rng,
            );
            assert!(rec.is_leaf);
            diffusive_steps += rec.steps as f64;
        }
        assert!(
            momentum_steps < diffusive_steps,
            "momentum {momentum_steps} vs diffusive {diffusive_steps}"
        );
    }
}
