use std::sync::Arc;

use rand::Rng;
use rand::RngCore;

use crate::seq::Seq;

/// Autoregressive base model over a fixed alphabet and horizon.
///
/// `conditionals` returns the next-action law at a prefix of depth `< horizon`
/// as a dense vector of length `alphabet_size`, summing to 1 within 1e-12.
/// Entries may be exactly zero (hard constraints); downstream code treats a
/// zero conditional as an absent edge.
pub trait BaseModel: Send + Sync {
    fn alphabet_size(&self) -> usize;
    fn horizon(&self) -> usize;
    fn conditionals(&self, prefix: &Seq) -> Vec<f64>;

    /// Sample one action by inverse CDF over `conditionals`.
    fn sample_action(&self, prefix: &Seq, rng: &mut dyn RngCore) -> u32 {
        let probs = self.conditionals(prefix);
        sample_index(&probs, rng) as u32
    }

    /// Sample a full root-to-leaf path.
    fn sample_path(&self, rng: &mut dyn RngCore) -> Seq {
        let mut y = Seq::root();
        for _ in 0..self.horizon() {
            let a = self.sample_action(&y, rng);
            y.push(a);
        }
        y
    }
}

/// Inverse-CDF draw over a probability vector. Zero-probability entries are
/// never selected; accumulated rounding noise lands on the last positive entry.
pub(crate) fn sample_index(probs: &[f64], rng: &mut dyn RngCore) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last_positive = None;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last_positive = Some(i);
            if u < acc {
                return i;
            }
        }
    }
    last_positive.expect("sample_index over all-zero weights")
}

/// Log density of the path from the root to `seq` under the model,
/// `sum_h ln pi_ref(y_h | y_{1:h-1})`. Zero conditionals give `-inf`.
pub fn path_log_density(model: &dyn BaseModel, seq: &Seq) -> f64 {
    let mut total = 0.0;
    let mut prefix = Seq::root();
    for &a in seq.actions() {
        let probs = model.conditionals(&prefix);
        total += probs[a as usize].ln();
        prefix.push(a);
    }
    total
}

/// Tree neighborhood of `seq`: the parent (if any) first, then children in
/// action order (depth `horizon` nodes have no children). Panics if `seq` is
/// deeper than the model horizon; that is a caller contract violation.
pub fn neighborhood(model: &dyn BaseModel, seq: &Seq) -> Vec<Seq> {
    let h = seq.depth();
    let horizon = model.horizon();
    assert!(h <= horizon, "node depth {h} exceeds horizon {horizon}");
    let mut out = Vec::with_capacity(1 + model.alphabet_size());
    if let Some(p) = seq.parent() {
        out.push(p);
    }
    if h < horizon {
        for a in 0..model.alphabet_size() as u32 {
            out.push(seq.child(a));
        }
    }
    out
}

/// Unweighted neighborhood law at `seq`: from the root, move to a child with
/// the model conditionals; from a leaf, move to the parent; from an internal
/// node, move to the parent with probability 1/2 and to child `a` with
/// probability `pi_ref(a | seq) / 2`. Zero-probability children are omitted.
pub fn q_ref(model: &dyn BaseModel, seq: &Seq) -> Vec<(Seq, f64)> {
    let h = seq.depth();
    let horizon = model.horizon();
    assert!(h <= horizon, "node depth {h} exceeds horizon {horizon}");
    let mut out = Vec::new();
    let parent_mass = if h == 0 {
        0.0
    } else if h == horizon {
        1.0
    } else {
        0.5
    };
    if parent_mass > 0.0 {
        out.push((seq.parent().unwrap(), parent_mass));
    }
    if h < horizon {
        let child_scale = 1.0 - parent_mass;
        for (a, &p) in model.conditionals(seq).iter().enumerate() {
            if p > 0.0 {
                out.push((seq.child(a as u32), child_scale * p));
            }
        }
    }
    out
}

/// Uniform conditionals at every prefix.
#[derive(Clone, Debug)]
pub struct UniformModel {
    pub alphabet: usize,
    pub horizon: usize,
}

impl UniformModel {
    pub fn new(alphabet: usize, horizon: usize) -> Self {
        assert!(alphabet >= 1);
        UniformModel { alphabet, horizon }
    }
}

impl BaseModel for UniformModel {
    fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn conditionals(&self, _prefix: &Seq) -> Vec<f64> {
        vec![1.0 / self.alphabet as f64; self.alphabet]
    }
}

/// Base model defined by a closure, for one-off fixtures.
#[derive(Clone)]
pub struct FnModel {
    pub alphabet: usize,
    pub horizon: usize,
    cond: Arc<dyn Fn(&Seq) -> Vec<f64> + Send + Sync>,
}

impl FnModel {
    pub fn new(
        alphabet: usize,
        horizon: usize,
        cond: impl Fn(&Seq) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        FnModel { alphabet, horizon, cond: Arc::new(cond) }
    }
}

impl BaseModel for FnModel {
    fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn conditionals(&self, prefix: &Seq) -> Vec<f64> {
        (self.cond)(prefix)
    }
}
