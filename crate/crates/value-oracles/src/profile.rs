use tree_core::{BaseModel, Seq, TargetDist, TreeError};

use crate::oracle::{OracleError, ValueOracle};

/// Floor applied to denominators when normalizing Bellman defects, so exact
/// zeros report a defect of zero instead of NaN.
pub const DEFECT_DENOM_FLOOR: f64 = 1e-300;

/// Multiplicative error of an oracle against exact values.
///
/// `kappa_sup` is the supremum over internal nodes of
/// `max(Vhat/V, V/Vhat)`; `kappa_leaf` the same over leaves. Nodes where both
/// values vanish are skipped (a dead node scored as dead is not an error);
/// a zero on exactly one side yields infinity.
///
/// `avg_over[h-1]` and `avg_under[h-1]`, for depths `h = 1..=H`, are the
/// target-averaged ratios `E[Vhat/V]` and `E[V/Vhat]` at depth `h`.
#[derive(Clone, Debug)]
pub struct ErrorProfile {
    pub kappa_sup: f64,
    pub kappa_leaf: f64,
    pub avg_over: Vec<f64>,
    pub avg_under: Vec<f64>,
}

impl ErrorProfile {
    /// Smallest constant for which every depth's averaged ratios are covered.
    pub fn kappa_avg(&self) -> f64 {
        self.avg_over
            .iter()
            .chain(self.avg_under.iter())
            .copied()
            .fold(1.0f64, f64::max)
    }
}

/// Profile `oracle` against `exact` over the reachable tree, averaging with
/// the depth marginals of `target`. Enumeration stops at `cap` leaves.
pub fn error_profile(
    oracle: &dyn ValueOracle,
    exact: &dyn ValueOracle,
    model: &dyn BaseModel,
    target: &TargetDist,
    cap: usize,
) -> Result<ErrorProfile, OracleError> {
    let horizon = model.horizon();
    let mut kappa_sup = 1.0f64;
    let mut kappa_leaf = 1.0f64;

    let mut leaves = 0usize;
    let mut stack = vec![Seq::root()];
    while let Some(y) = stack.pop() {
        let h = y.depth();
        if h > 0 {
            let lo = oracle.log_value(&y);
            let le = exact.log_value(&y);
            let ratio = sup_ratio(lo, le);
            if h == horizon {
                kappa_leaf = kappa_leaf.max(ratio);
            } else {
                kappa_sup = kappa_sup.max(ratio);
            }
        }
        if h == horizon {
            leaves += 1;
            if leaves > cap {
                return Err(TreeError::CapExceeded { cap }.into());
            }
            continue;
        }
        for (a, &p) in model.conditionals(&y).iter().enumerate() {
            if p > 0.0 {
                stack.push(y.child(a as u32));
            }
        }
    }

    let mut avg_over = Vec::with_capacity(horizon);
    let mut avg_under = Vec::with_capacity(horizon);
    for h in 1..=horizon {
        let marginal = target.marginal_at(h);
        let mut over = 0.0;
        let mut under = 0.0;
        for (y, &mass) in &marginal {
            let lo = oracle.log_value(y);
            let le = exact.log_value(y);
            debug_assert!(le.is_finite(), "target-positive prefix with zero exact value");
            over += mass * (lo - le).exp();
            under += mass * (le - lo).exp();
        }
        avg_over.push(over);
        avg_under.push(under);
    }

    Ok(ErrorProfile { kappa_sup, kappa_leaf, avg_over, avg_under })
}

fn sup_ratio(log_a: f64, log_b: f64) -> f64 {
    let a_dead = log_a == f64::NEG_INFINITY;
    let b_dead = log_b == f64::NEG_INFINITY;
    match (a_dead, b_dead) {
        (true, true) => 1.0,
        (true, false) | (false, true) => f64::INFINITY,
        (false, false) => (log_a - log_b).abs().exp(),
    }
}

/// Worst relative one-step self-consistency violation over internal nodes:
/// `max |V(y) - sum_a pi_ref(a|y) V(y a)| / max(V(y), floor)`.
///
/// The exact oracle satisfies this identity by definition; a zero defect for
/// an arbitrary oracle certifies that per-step sampling proportional to
/// `pi_ref * V` composes into the leaf law proportional to `pi_ref * V`.
pub fn bellman_defect(
    oracle: &dyn ValueOracle,
    model: &dyn BaseModel,
    cap: usize,
) -> Result<f64, OracleError> {
    let horizon = model.horizon();
    let mut worst = 0.0f64;
    let mut leaves = 0usize;
    let mut stack = vec![Seq::root()];
    while let Some(y) = stack.pop() {
        if y.depth() == horizon {
            leaves += 1;
            if leaves > cap {
                return Err(TreeError::CapExceeded { cap }.into());
            }
            continue;
        }
        let conds = model.conditionals(&y);
        let mut one_step = 0.0;
        for (a, &p) in conds.iter().enumerate() {
            if p > 0.0 {
                let child = y.child(a as u32);
                one_step += p * oracle.value(&child);
                stack.push(child);
            }
        }
        let here = oracle.value(&y);
        let defect = (here - one_step).abs() / here.max(DEFECT_DENOM_FLOOR);
        worst = worst.max(defect);
    }
    Ok(worst)
}
