use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tree_core::{BaseModel, Seq, TiltSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct RolloutRecord {
    pub leaf: Seq,
    /// Terminal label: tau(y) for binary or bounded tilts, the raw reward
    /// when the tilt was built from a reward (so labels stay in [0, 1]).
    pub label: f64,
}

#[derive(Debug, Clone)]
pub struct RolloutDataset {
    records: Vec<RolloutRecord>,
    seed: u64,
    horizon: usize,
    alphabet: usize,
}

/// N i.i.d. full paths from the base model, labeled at the leaf.
pub fn generate_rollouts(
    model: &dyn BaseModel,
    tilt: &TiltSpec,
    n: usize,
    seed: u64,
) -> RolloutDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let records = (0..n)
        .map(|_| {
            let leaf = model.sample_path(&mut rng);
            let label = match tilt.reward_form() {
                Some(rf) => rf.beta * tilt.log_tau(&leaf),
                None => tilt.tau(&leaf),
            };
            debug_assert!(label >= 0.0);
            RolloutRecord { leaf, label }
        })
        .collect();
    RolloutDataset {
        records,
        seed,
        horizon: model.horizon(),
        alphabet: model.alphabet_size(),
    }
}

impl RolloutDataset {
    /// Assemble a dataset directly, e.g. from synthetic labels. Every leaf
    /// must have depth `horizon` and labels must be nonnegative.
    pub fn from_records(
        records: Vec<RolloutRecord>,
        horizon: usize,
        alphabet: usize,
        seed: u64,
    ) -> Self {
        assert!(records
            .iter()
            .all(|r| r.leaf.depth() == horizon && r.label >= 0.0));
        RolloutDataset {
            records,
            seed,
            horizon,
            alphabet,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[RolloutRecord] {
        &self.records
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    pub fn label_mean(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.records.iter().map(|r| r.label).sum::<f64>() / self.records.len() as f64
    }
}
