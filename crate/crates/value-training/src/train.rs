use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tree_core::TiltSpec;

use crate::mlp::MlpValueNet;
use crate::rollout::RolloutDataset;

#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error("no rollouts to train on")]
    EmptyData,
    #[error("depth {depth} outside trainable range [1, {horizon}]")]
    DepthOutOfRange { depth: usize, horizon: usize },
    #[error("no network for depth {0}")]
    MissingDepth(usize),
    #[error("{0}")]
    Mismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("bad oracle file: {0}")]
    BadHeader(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    CrossEntropy,
    SquaredError,
}

impl Loss {
    /// Cross-entropy for indicator tilts, squared error otherwise.
    pub fn for_tilt(tilt: &TiltSpec) -> Loss {
        if tilt.is_binary() {
            Loss::CrossEntropy
        } else {
            Loss::SquaredError
        }
    }
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct TrainConfig {
    pub width: usize,
    /// Number of Adam updates. One update spans the whole dataset when
    /// `batch_size` is None, one minibatch otherwise.
    pub steps: usize,
    pub lr: f64,
    pub weight_decay: f64,
    pub batch_size: Option<usize>,
    pub loss: Loss,
    pub seed: u64,
}

impl TrainConfig {
    pub fn abc() -> Self {
        TrainConfig {
            width: 128,
            steps: 100,
            lr: 0.01,
            weight_decay: 0.0,
            batch_size: None,
            loss: Loss::CrossEntropy,
            seed: 0,
        }
    }

    pub fn parity() -> Self {
        TrainConfig {
            width: 128,
            steps: 10_000,
            lr: 0.001,
            weight_decay: 0.0,
            batch_size: Some(128),
            loss: Loss::SquaredError,
            seed: 0,
        }
    }

    /// 12_520 updates is 40 epochs at the reference scale (10^4 rollouts,
    /// batches of 32).
    pub fn dyck() -> Self {
        TrainConfig {
            width: 64,
            steps: 12_520,
            lr: 0.003,
            weight_decay: 0.1,
            batch_size: Some(32),
            loss: Loss::SquaredError,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub depth: usize,
    /// Mean training loss at each update, in order.
    pub losses: Vec<f64>,
}

/// A weighted regression example. Rollouts sharing a prefix collapse into
/// one example with their count as weight and their label mean as target;
/// `var` restores the within-group spread so reported squared-error losses
/// match the per-rollout mean exactly (it never enters the gradient).
struct Example {
    hot: Vec<usize>,
    label: f64,
    weight: f64,
    var: f64,
}

struct Grads {
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: f64,
}

/// Weighted mean loss and gradient over one batch.
fn loss_and_grad(net: &MlpValueNet, batch: &[&Example], loss: Loss) -> (f64, Grads) {
    let in_dim = net.in_dim();
    let mut g = Grads {
        w1: vec![0.0; net.w1.len()],
        b1: vec![0.0; net.b1.len()],
        w2: vec![0.0; net.w2.len()],
        b2: 0.0,
    };
    let mut total = 0.0;
    let mut weight_sum = 0.0;
    for e in batch {
        let (z1, p) = net.forward_parts(&e.hot);
        let t = e.label;
        let (l, mut g_z2) = match loss {
            Loss::CrossEntropy => {
                let pc = p.clamp(1e-12, 1.0 - 1e-12);
                (-(t * pc.ln() + (1.0 - t) * (1.0 - pc).ln()), p - t)
            }
            Loss::SquaredError => {
                let d = p - t;
                (d * d + e.var, 2.0 * d * p * (1.0 - p))
            }
        };
        total += e.weight * l;
        weight_sum += e.weight;
        g_z2 *= e.weight;
        g.b2 += g_z2;
        for i in 0..net.width {
            if z1[i] > 0.0 {
                g.w2[i] += g_z2 * z1[i];
                let g_z1 = g_z2 * net.w2[i];
                g.b1[i] += g_z1;
                for &j in &e.hot {
                    g.w1[i * in_dim + j] += g_z1;
                }
            }
        }
    }
    for x in g
        .w1
        .iter_mut()
        .chain(g.b1.iter_mut())
        .chain(g.w2.iter_mut())
        .chain(std::iter::once(&mut g.b2))
    {
        *x /= weight_sum;
    }
    (total / weight_sum, g)
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
    lr: f64,
    weight_decay: f64,
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

impl Adam {
    fn new(n_params: usize, lr: f64, weight_decay: f64) -> Self {
        Adam {
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            t: 0,
            lr,
            weight_decay,
        }
    }

    /// Weight decay enters the gradient (classic Adam, not decoupled).
    fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        assert_eq!(params.len(), grads.len());
        self.t += 1;
        let bc1 = 1.0 - BETA1.powi(self.t as i32);
        let bc2 = 1.0 - BETA2.powi(self.t as i32);
        for i in 0..params.len() {
            let g = grads[i] + self.weight_decay * params[i];
            self.m[i] = BETA1 * self.m[i] + (1.0 - BETA1) * g;
            self.v[i] = BETA2 * self.v[i] + (1.0 - BETA2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
        }
    }
}

fn flatten_grads(g: &Grads) -> Vec<f64> {
    let mut flat = Vec::with_capacity(g.w1.len() + g.b1.len() + g.w2.len() + 1);
    flat.extend_from_slice(&g.w1);
    flat.extend_from_slice(&g.b1);
    flat.extend_from_slice(&g.w2);
    flat.push(g.b2);
    flat
}

/// Rollouts bucketed by their depth-`depth` prefix. BTreeMap keeps the
/// bucket order independent of hashing, so training stays deterministic.
fn grouped_examples(net: &MlpValueNet, data: &RolloutDataset, depth: usize) -> Vec<Example> {
    let mut buckets: BTreeMap<Vec<u32>, (f64, f64, f64)> = BTreeMap::new();
    for r in data.records() {
        let key = r.leaf.prefix(depth).actions().to_vec();
        let e = buckets.entry(key).or_insert((0.0, 0.0, 0.0));
        e.0 += 1.0;
        e.1 += r.label;
        e.2 += r.label * r.label;
    }
    buckets
        .into_iter()
        .map(|(actions, (n, sum, sumsq))| {
            let mean = sum / n;
            Example {
                hot: net.hot(&tree_core::Seq::from_actions(actions)),
                label: mean,
                weight: n,
                var: (sumsq / n - mean * mean).max(0.0),
            }
        })
        .collect()
}

/// Fit a depth-`depth` value net to the rollouts' terminal labels.
///
/// Deterministic given (config.seed, data order, config): initialization and
/// minibatch shuffling run on a stream keyed by the depth, so nets for
/// different depths differ even under one seed.
pub fn train_value_net(
    data: &RolloutDataset,
    depth: usize,
    config: &TrainConfig,
) -> Result<(MlpValueNet, TrainReport), TrainError> {
    if data.is_empty() {
        return Err(TrainError::EmptyData);
    }
    if depth == 0 || depth > data.horizon() {
        return Err(TrainError::DepthOutOfRange {
            depth,
            horizon: data.horizon(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(depth as u64);
    let mut net = MlpValueNet::init(depth, data.alphabet_size(), config.width, &mut rng);

    let mut adam = Adam::new(net.param_count(), config.lr, config.weight_decay);
    let mut params = net.flatten();
    let mut losses = Vec::with_capacity(config.steps);

    match config.batch_size {
        None => {
            let groups = grouped_examples(&net, data, depth);
            let batch: Vec<&Example> = groups.iter().collect();
            for _ in 0..config.steps {
                let (l, g) = loss_and_grad(&net, &batch, config.loss);
                adam.step(&mut params, &flatten_grads(&g));
                net.apply_flat(&params);
                losses.push(l);
            }
        }
        Some(b) => {
            assert!(b > 0, "batch size must be positive");
            let singles: Vec<Example> = data
                .records()
                .iter()
                .map(|r| Example {
                    hot: net.hot(&r.leaf.prefix(depth)),
                    label: r.label,
                    weight: 1.0,
                    var: 0.0,
                })
                .collect();
            let mut order: Vec<usize> = (0..singles.len()).collect();
            'outer: loop {
                order.shuffle(&mut rng);
                for chunk in order.chunks(b) {
                    if losses.len() == config.steps {
                        break 'outer;
                    }
                    let batch: Vec<&Example> = chunk.iter().map(|&i| &singles[i]).collect();
                    let (l, g) = loss_and_grad(&net, &batch, config.loss);
                    adam.step(&mut params, &flatten_grads(&g));
                    net.apply_flat(&params);
                    losses.push(l);
                }
            }
        }
    }

    Ok((net, TrainReport { depth, losses }))
}
