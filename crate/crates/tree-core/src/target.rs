use std::collections::BTreeMap;

use crate::error::TreeError;
use crate::logs::logsumexp;
use crate::model::BaseModel;
use crate::seq::Seq;
use crate::tilt::TiltSpec;

/// Hard cap on enumerated leaves for exact-law construction.
pub const DEFAULT_ENUM_CAP: usize = 200_000;

/// Exact target law `pi*(y) ∝ pi_ref(y) * tau(y)` over leaves.
///
/// Only leaves with positive mass are stored; `prob` returns 0 elsewhere.
/// `log_normalizer` is `ln sum_y pi_ref(y) tau(y)`, the log root value of the
/// tilt.
#[derive(Clone, Debug)]
pub struct TargetDist {
    probs: BTreeMap<Seq, f64>,
    log_normalizer: f64,
    horizon: usize,
}

impl TargetDist {
    /// Build from `(leaf, ln(pi_ref(leaf) * tau(leaf)))` pairs. Pairs with
    /// `-inf` weight are dropped; errors if nothing remains.
    pub fn from_log_weights(
        pairs: impl IntoIterator<Item = (Seq, f64)>,
        horizon: usize,
    ) -> Result<Self, TreeError> {
        let finite: Vec<(Seq, f64)> =
            pairs.into_iter().filter(|(_, lw)| lw.is_finite()).collect();
        if finite.is_empty() {
            return Err(TreeError::DegenerateTarget);
        }
        let lse = logsumexp(&finite.iter().map(|(_, lw)| *lw).collect::<Vec<_>>());
        let probs = finite
            .into_iter()
            .map(|(y, lw)| {
                debug_assert_eq!(y.depth(), horizon, "target support must be leaves");
                (y, (lw - lse).exp())
            })
            .collect();
        Ok(TargetDist { probs, log_normalizer: lse, horizon })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn prob(&self, leaf: &Seq) -> f64 {
        self.probs.get(leaf).copied().unwrap_or(0.0)
    }

    /// `ln V(root)` where `V(root) = sum_y pi_ref(y) tau(y)`.
    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }

    pub fn normalizer(&self) -> f64 {
        self.log_normalizer.exp()
    }

    pub fn support_len(&self) -> usize {
        self.probs.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Seq, f64)> {
        self.probs.iter().map(|(y, &p)| (y, p))
    }

    pub fn as_map(&self) -> &BTreeMap<Seq, f64> {
        &self.probs
    }

    pub fn expectation(&self, f: impl Fn(&Seq) -> f64) -> f64 {
        self.probs.iter().map(|(y, &p)| p * f(y)).sum()
    }

    /// Marginal law of the depth-`h` prefix under the target.
    pub fn marginal_at(&self, h: usize) -> BTreeMap<Seq, f64> {
        assert!(h <= self.horizon);
        let mut out: BTreeMap<Seq, f64> = BTreeMap::new();
        for (y, &p) in &self.probs {
            *out.entry(y.prefix(h)).or_insert(0.0) += p;
        }
        out
    }
}

/// Enumerate the instance and materialize the exact target law.
///
/// Walks only prefixes with positive base density; errors with
/// [`TreeError::CapExceeded`] as soon as more than `cap` leaves are reachable,
/// and with [`TreeError::DegenerateTarget`] when the tilt vanishes everywhere.
pub fn exact_target(
    model: &dyn BaseModel,
    tilt: &TiltSpec,
    cap: usize,
) -> Result<TargetDist, TreeError> {
    let mut pairs: Vec<(Seq, f64)> = Vec::new();
    let mut leaves_seen = 0usize;
    let mut stack: Vec<(Seq, f64)> = vec![(Seq::root(), 0.0)];
    while let Some((y, lp)) = stack.pop() {
        if y.depth() == model.horizon() {
            leaves_seen += 1;
            if leaves_seen > cap {
                return Err(TreeError::CapExceeded { cap });
            }
            pairs.push((y.clone(), lp + tilt.log_tau(&y)));
            continue;
        }
        for (a, &p) in model.conditionals(&y).iter().enumerate() {
            if p > 0.0 {
                stack.push((y.child(a as u32), lp + p.ln()));
            }
        }
    }
    TargetDist::from_log_weights(pairs, model.horizon())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::UniformModel;

    #[test]
    fn matching_pair_tilt_gives_uniform_on_diagonal() {
        // |A| = 2, H = 2, tau = 1{y1 = y2}: target is uniform on {00, 11}.
        let m = UniformModel::new(2, 2);
        let tilt = TiltSpec::binary(|y: &Seq| y.actions()[0] == y.actions()[1]);
        let t = exact_target(&m, &tilt, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(t.support_len(), 2);
        assert!((t.prob(&Seq::from_actions([0, 0])) - 0.5).abs() < 1e-15);
        assert!((t.prob(&Seq::from_actions([1, 1])) - 0.5).abs() < 1e-15);
        assert_eq!(t.prob(&Seq::from_actions([0, 1])), 0.0);
        assert!((t.normalizer() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let m = UniformModel::new(3, 4);
        let tilt = TiltSpec::from_reward(
            |y: &Seq| y.actions().iter().filter(|&&a| a == 0).count() as f64 / 4.0,
            0.5,
            1.0,
        );
        let t = exact_target(&m, &tilt, DEFAULT_ENUM_CAP).unwrap();
        let total: f64 = t.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(t.support_len(), 81);
    }

    #[test]
    fn marginals_aggregate_leaf_mass() {
        let m = UniformModel::new(2, 3);
        let tilt = TiltSpec::binary(|y: &Seq| y.actions()[0] == 0);
        let t = exact_target(&m, &tilt, DEFAULT_ENUM_CAP).unwrap();
        let m1 = t.marginal_at(1);
        assert!((m1[&Seq::from_actions([0])] - 1.0).abs() < 1e-12);
        assert!(m1.get(&Seq::from_actions([1])).is_none());
        let m0 = t.marginal_at(0);
        assert!((m0[&Seq::root()] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cap_and_degeneracy_errors() {
        let m = UniformModel::new(2, 10);
        let tilt = TiltSpec::binary(|_: &Seq| true);
        match exact_target(&m, &tilt, 100) {
            Err(TreeError::CapExceeded { cap: 100 }) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
        let dead = TiltSpec::binary(|_: &Seq| false);
        match exact_target(&m, &dead, DEFAULT_ENUM_CAP) {
            Err(TreeError::DegenerateTarget) => {}
            other => panic!("expected degenerate error, got {other:?}"),
        }
    }

    #[test]
    fn deep_horizon_stays_in_log_space() {
        // pi_ref(y) = 2^-400 underflows linearly; the normalizer must not.
        let m = UniformModel::new(2, 400);
        let tilt = TiltSpec::binary(|y: &Seq| y.actions().iter().all(|&a| a == 0));
        // Enumeration would explode; build from the single supported leaf.
        let leaf = Seq::from_actions(vec![0u32; 400]);
        let lw = crate::model::path_log_density(&m, &leaf) + tilt.log_tau(&leaf);
        let t = TargetDist::from_log_weights([(leaf.clone(), lw)], 400).unwrap();
        assert_eq!(t.prob(&leaf), 1.0);
        assert!((t.log_normalizer() - 400.0 * 0.5f64.ln()).abs() < 1e-9);
        assert_eq!(m.horizon(), 400);
    }
}
