use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;
use tree_core::{BaseModel, Seq, TiltSpec, TreeError};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("decay factor must lie in (0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// A value function over tree nodes, queried in log space.
///
/// `exact_at_leaves` declares that depth-`H` values coincide with the leaf
/// tilt; samplers that need true terminal rewards check this flag.
pub trait ValueOracle: Send + Sync {
    /// `ln V(y_{1:h})`; `-inf` encodes a zero value.
    fn log_value(&self, seq: &Seq) -> f64;

    fn exact_at_leaves(&self) -> bool;

    fn value(&self, seq: &Seq) -> f64 {
        self.log_value(seq).exp()
    }
}

impl<T: ValueOracle + ?Sized> ValueOracle for Arc<T> {
    fn log_value(&self, seq: &Seq) -> f64 {
        (**self).log_value(seq)
    }

    fn exact_at_leaves(&self) -> bool {
        (**self).exact_at_leaves()
    }
}

/// Table-backed oracle built by one backward recursion over the reachable
/// tree. The build phase is single-threaded; afterwards the table is immutable
/// and safe for concurrent reads.
///
/// Nodes never enumerated (zero base density on the path) carry value zero.
pub struct TableOracle {
    table: HashMap<Seq, f64>,
    horizon: usize,
    exact_at_leaves: bool,
}

impl TableOracle {
    /// Backward recursion from arbitrary leaf log values:
    /// `ln V(y) = ln sum_a pi_ref(a|y) exp(ln V(y a))` for internal nodes.
    /// Errors when more than `cap` leaves are reachable.
    pub fn from_leaf_values(
        model: &dyn BaseModel,
        leaf_log_value: impl Fn(&Seq) -> f64,
        cap: usize,
        exact_at_leaves: bool,
    ) -> Result<Self, OracleError> {
        let mut table = HashMap::new();
        let mut leaves = 0usize;
        build_rec(model, &leaf_log_value, cap, &mut leaves, &mut table, &mut Seq::root())?;
        Ok(TableOracle { table, horizon: model.horizon(), exact_at_leaves })
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// All enumerated nodes with their log values.
    pub fn iter(&self) -> impl Iterator<Item = (&Seq, f64)> {
        self.table.iter().map(|(y, &lv)| (y, lv))
    }
}

fn build_rec(
    model: &dyn BaseModel,
    leaf_log_value: &impl Fn(&Seq) -> f64,
    cap: usize,
    leaves: &mut usize,
    table: &mut HashMap<Seq, f64>,
    y: &mut Seq,
) -> Result<f64, OracleError> {
    if y.depth() == model.horizon() {
        *leaves += 1;
        if *leaves > cap {
            return Err(TreeError::CapExceeded { cap }.into());
        }
        let lv = leaf_log_value(y);
        table.insert(y.clone(), lv);
        return Ok(lv);
    }
    let conds = model.conditionals(y);
    let mut logs = Vec::with_capacity(conds.len());
    for (a, &p) in conds.iter().enumerate() {
        if p > 0.0 {
            y.push(a as u32);
            let child = build_rec(model, leaf_log_value, cap, leaves, table, y)?;
            y.pop();
            logs.push(p.ln() + child);
        }
    }
    let lv = tree_core::logsumexp(&logs);
    table.insert(y.clone(), lv);
    Ok(lv)
}

impl ValueOracle for TableOracle {
    fn log_value(&self, seq: &Seq) -> f64 {
        self.table.get(seq).copied().unwrap_or(f64::NEG_INFINITY)
    }

    fn exact_at_leaves(&self) -> bool {
        self.exact_at_leaves
    }
}

/// Exact values by full enumeration: leaf values are the tilt itself.
pub fn exact_oracle(
    model: &dyn BaseModel,
    tilt: &TiltSpec,
    cap: usize,
) -> Result<TableOracle, OracleError> {
    TableOracle::from_leaf_values(model, |y| tilt.log_tau(y), cap, true)
}

/// Oracle given by a closed-form log-value function.
#[derive(Clone)]
pub struct ClosedFormOracle {
    f: Arc<dyn Fn(&Seq) -> f64 + Send + Sync>,
    exact_at_leaves: bool,
}

impl ClosedFormOracle {
    pub fn new(f: impl Fn(&Seq) -> f64 + Send + Sync + 'static, exact_at_leaves: bool) -> Self {
        ClosedFormOracle { f: Arc::new(f), exact_at_leaves }
    }
}

impl ValueOracle for ClosedFormOracle {
    fn log_value(&self, seq: &Seq) -> f64 {
        (self.f)(seq)
    }

    fn exact_at_leaves(&self) -> bool {
        self.exact_at_leaves
    }
}

/// Multiplies the inner value by `1 + eps` at internal nodes whose last action
/// is the marked one. Leaves and the root are untouched, so leaf exactness is
/// inherited.
pub struct PerturbedOracle<O> {
    inner: O,
    log_factor: f64,
    marked: u32,
    horizon: usize,
}

impl<O: ValueOracle> PerturbedOracle<O> {
    pub fn new(inner: O, eps: f64, marked: u32, horizon: usize) -> Self {
        assert!(eps >= 0.0, "perturbation must be nonnegative");
        PerturbedOracle { inner, log_factor: (1.0 + eps).ln(), marked, horizon }
    }
}

impl<O: ValueOracle> ValueOracle for PerturbedOracle<O> {
    fn log_value(&self, seq: &Seq) -> f64 {
        let base = self.inner.log_value(seq);
        let h = seq.depth();
        if h >= 1 && h < self.horizon && seq.last() == Some(self.marked) {
            base + self.log_factor
        } else {
            base
        }
    }

    fn exact_at_leaves(&self) -> bool {
        self.inner.exact_at_leaves()
    }
}

/// One-step stale values: the node reports its parent's exact value
/// (the root reports its own). Depth-`H` values are then wrong, so
/// `exact_at_leaves` is false.
pub struct DelayedOracle<O> {
    exact: O,
}

impl<O: ValueOracle> DelayedOracle<O> {
    pub fn new(exact: O) -> Self {
        DelayedOracle { exact }
    }
}

impl<O: ValueOracle> ValueOracle for DelayedOracle<O> {
    fn log_value(&self, seq: &Seq) -> f64 {
        match seq.parent() {
            Some(p) => self.exact.log_value(&p),
            None => self.exact.log_value(seq),
        }
    }

    fn exact_at_leaves(&self) -> bool {
        false
    }
}

/// `V(y_{1:h}) = alpha^(H-h) * 1{viable(y_{1:h})}` for a monotone viability
/// predicate (once a prefix turns nonviable, no extension may turn it back).
/// At leaves the exponent vanishes, so values equal the 0/1 predicate.
pub struct GeometricOracle {
    viable: Arc<dyn Fn(&Seq) -> bool + Send + Sync>,
    log_alpha: f64,
    horizon: usize,
}

impl GeometricOracle {
    pub fn new(
        viable: impl Fn(&Seq) -> bool + Send + Sync + 'static,
        alpha: f64,
        horizon: usize,
    ) -> Result<Self, OracleError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(OracleError::InvalidAlpha(alpha));
        }
        Ok(GeometricOracle { viable: Arc::new(viable), log_alpha: alpha.ln(), horizon })
    }

    /// Spot-check monotonicity by extending random viable prefixes and
    /// verifying no nonviable node has a viable descendant on the sampled
    /// paths. Returns the number of violations found.
    pub fn check_monotone(
        &self,
        model: &dyn BaseModel,
        rng: &mut dyn rand::RngCore,
        samples: usize,
    ) -> usize {
        let mut violations = 0;
        for _ in 0..samples {
            let mut y = Seq::root();
            let mut dead = false;
            for _ in 0..model.horizon() {
                let a = model.sample_action(&y, rng);
                y.push(a);
                let alive = (self.viable)(&y);
                if dead && alive {
                    violations += 1;
                }
                dead = !alive;
            }
        }
        violations
    }
}

impl ValueOracle for GeometricOracle {
    fn log_value(&self, seq: &Seq) -> f64 {
        if (self.viable)(seq) {
            (self.horizon - seq.depth()) as f64 * self.log_alpha
        } else {
            f64::NEG_INFINITY
        }
    }

    // Exactness holds when the leaf predicate coincides with the tilt, which
    // is the caller's responsibility (checked against instance fixtures in
    // tests, not enforceable here).
    fn exact_at_leaves(&self) -> bool {
        true
    }
}

/// Replaces depth-`H` values with the true leaf tilt and delegates elsewhere.
pub struct WithExactLeaves<O> {
    inner: O,
    tilt: TiltSpec,
    horizon: usize,
}

impl<O: ValueOracle> WithExactLeaves<O> {
    pub fn new(inner: O, tilt: TiltSpec, horizon: usize) -> Self {
        WithExactLeaves { inner, tilt, horizon }
    }
}

impl<O: ValueOracle> ValueOracle for WithExactLeaves<O> {
    fn log_value(&self, seq: &Seq) -> f64 {
        if seq.depth() == self.horizon {
            self.tilt.log_tau(seq)
        } else {
            self.inner.log_value(seq)
        }
    }

    fn exact_at_leaves(&self) -> bool {
        true
    }
}
