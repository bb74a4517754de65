use std::collections::BTreeMap;

use tree_core::{Seq, TargetDist};

/// Total variation distance, 1/2 the L1 over the union of supports.
pub fn tv(p: &BTreeMap<Seq, f64>, q: &BTreeMap<Seq, f64>) -> f64 {
    let mut acc = 0.0;
    for (y, &pp) in p {
        acc += (pp - q.get(y).copied().unwrap_or(0.0)).abs();
    }
    for (y, &qq) in q {
        if !p.contains_key(y) {
            acc += qq;
        }
    }
    0.5 * acc
}

/// KL(p || q). Infinite when p puts mass outside the support of q.
pub fn kl(p: &BTreeMap<Seq, f64>, q: &BTreeMap<Seq, f64>) -> f64 {
    let mut acc = 0.0;
    for (y, &pp) in p {
        if pp == 0.0 {
            continue;
        }
        let qq = q.get(y).copied().unwrap_or(0.0);
        if qq == 0.0 {
            return f64::INFINITY;
        }
        acc += pp * (pp / qq).ln();
    }
    acc
}

/// chi^2(p || q) = sum_q (p-q)^2 / q. Infinite when p leaks outside q.
pub fn chi2(p: &BTreeMap<Seq, f64>, q: &BTreeMap<Seq, f64>) -> f64 {
    for (y, &pp) in p {
        if pp > 0.0 && q.get(y).copied().unwrap_or(0.0) == 0.0 {
            return f64::INFINITY;
        }
    }
    let mut acc = 0.0;
    for (y, &qq) in q {
        if qq == 0.0 {
            continue;
        }
        let pp = p.get(y).copied().unwrap_or(0.0);
        acc += (pp - qq) * (pp - qq) / qq;
    }
    acc
}

/// Target mass of the leaves the law visits too rarely: those with
/// target(y) > ratio * law(y). The law need not be normalized over leaves.
pub fn coverage_quantile(target: &TargetDist, law: &BTreeMap<Seq, f64>, ratio: f64) -> f64 {
    target
        .iter()
        .filter(|(y, p)| *p > ratio * law.get(*y).copied().unwrap_or(0.0))
        .map(|(_, p)| p)
        .sum()
}

/// hist[i] = probability that position i+1 satisfies the predicate.
pub fn position_histogram(
    dist: &BTreeMap<Seq, f64>,
    horizon: usize,
    pred: impl Fn(u32) -> bool,
) -> Vec<f64> {
    let mut hist = vec![0.0; horizon];
    for (y, &p) in dist {
        for (i, &a) in y.actions().iter().enumerate() {
            if pred(a) {
                hist[i] += p;
            }
        }
    }
    hist
}

pub fn hist_l1(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}
