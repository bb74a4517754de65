use std::collections::BTreeMap;

use tree_core::{Seq, TargetDist};

/// Terminal counts from repeated sampler runs. Runs that stop before a leaf
/// (timeouts) are tallied separately and excluded from the leaf law.
#[derive(Clone, Debug, Default)]
pub struct EmpiricalDist {
    counts: BTreeMap<Seq, u64>,
    leaf_total: u64,
    nonleaf: u64,
}

impl EmpiricalDist {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_leaf(&mut self, leaf: Seq) {
        *self.counts.entry(leaf).or_insert(0) += 1;
        self.leaf_total += 1;
    }

    pub fn push_nonleaf(&mut self) {
        self.nonleaf += 1;
    }

    pub fn leaf_total(&self) -> u64 {
        self.leaf_total
    }

    pub fn nonleaf_fraction(&self) -> f64 {
        if self.leaf_total + self.nonleaf == 0 {
            return 0.0;
        }
        self.nonleaf as f64 / (self.leaf_total + self.nonleaf) as f64
    }

    pub fn counts(&self) -> &BTreeMap<Seq, u64> {
        &self.counts
    }

    /// Normalized leaf law.
    pub fn pmf(&self) -> BTreeMap<Seq, f64> {
        let n = self.leaf_total as f64;
        self.counts
            .iter()
            .map(|(y, &c)| (y.clone(), c as f64 / n))
            .collect()
    }

    /// Mass of leaves outside the target support.
    pub fn off_support_fraction(&self, target: &TargetDist) -> f64 {
        if self.leaf_total == 0 {
            return 0.0;
        }
        let off: u64 = self
            .counts
            .iter()
            .filter(|(y, _)| target.prob(y) == 0.0)
            .map(|(_, &c)| c)
            .sum();
        off as f64 / self.leaf_total as f64
    }

    /// KL of the add-half smoothed empirical law against the target,
    /// restricted to the target support: every supported leaf gets half a
    /// phantom count, so the estimate is finite at any sample size.
    pub fn smoothed_kl(&self, target: &TargetDist) -> f64 {
        let s = target.support_len() as f64;
        let n_in: u64 = self
            .counts
            .iter()
            .filter(|(y, _)| target.prob(y) > 0.0)
            .map(|(_, &c)| c)
            .sum();
        let denom = n_in as f64 + 0.5 * s;
        target
            .iter()
            .map(|(y, p)| {
                let c = self.counts.get(y).copied().unwrap_or(0) as f64;
                let p_hat = (c + 0.5) / denom;
                p_hat * (p_hat / p).ln()
            })
            .sum()
    }
}
