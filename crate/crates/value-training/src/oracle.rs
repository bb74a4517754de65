use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use tree_core::{BaseModel, Seq, TiltSpec};
use value_oracles::ValueOracle;

use crate::mlp::MlpValueNet;
use crate::rollout::RolloutDataset;
use crate::train::{train_value_net, TrainConfig, TrainError, TrainReport};

/// A stack of per-depth nets behaving as one value oracle.
///
/// Depths 1 through H-1 dispatch to their net. Leaves use the true terminal
/// weight when `use_true_leaf_rewards` is set, otherwise a depth-H net
/// trained like the others. The root, which no sampler ever queries, reports
/// the base-weighted average of its children for completeness.
pub struct TrainedOracle {
    model: Arc<dyn BaseModel>,
    tilt: TiltSpec,
    nets: BTreeMap<usize, MlpValueNet>,
    use_true_leaf_rewards: bool,
    horizon: usize,
    seed: u64,
}

impl std::fmt::Debug for TrainedOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TrainedOracle")
            .field("horizon", &self.horizon)
            .field("depths", &self.nets.keys().collect::<Vec<_>>())
            .field("use_true_leaf_rewards", &self.use_true_leaf_rewards)
            .field("seed", &self.seed)
            .finish()
    }
}

impl TrainedOracle {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn use_true_leaf_rewards(&self) -> bool {
        self.use_true_leaf_rewards
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn net(&self, depth: usize) -> Option<&MlpValueNet> {
        self.nets.get(&depth)
    }

    pub fn depths(&self) -> impl Iterator<Item = usize> + '_ {
        self.nets.keys().copied()
    }
}

impl ValueOracle for TrainedOracle {
    fn log_value(&self, y: &Seq) -> f64 {
        let h = y.depth();
        assert!(h <= self.horizon, "query below the leaves");
        if h == 0 {
            let cond = self.model.conditionals(y);
            let total: f64 = cond
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(a, &p)| p * self.log_value(&y.child(a as u32)).exp())
                .sum();
            return total.ln();
        }
        if h == self.horizon && self.use_true_leaf_rewards {
            return self.tilt.log_tau(y);
        }
        self.nets
            .get(&h)
            .expect("net coverage checked at assembly")
            .predict(y)
            .ln()
    }

    fn exact_at_leaves(&self) -> bool {
        self.use_true_leaf_rewards
    }
}

/// Validate and bundle per-depth nets into an oracle. Requires one net per
/// depth in [1, H-1], plus depth H when true leaf rewards are off.
pub fn assemble_trained_oracle(
    model: Arc<dyn BaseModel>,
    tilt: TiltSpec,
    nets: Vec<MlpValueNet>,
    use_true_leaf_rewards: bool,
) -> Result<TrainedOracle, TrainError> {
    let horizon = model.horizon();
    let mut by_depth = BTreeMap::new();
    for net in nets {
        if net.alphabet_size() != model.alphabet_size() {
            return Err(TrainError::Mismatch(format!(
                "net at depth {} expects alphabet {}, model has {}",
                net.depth(),
                net.alphabet_size(),
                model.alphabet_size()
            )));
        }
        let depth = net.depth();
        if depth == 0 || depth > horizon {
            return Err(TrainError::DepthOutOfRange { depth, horizon });
        }
        if by_depth.insert(depth, net).is_some() {
            return Err(TrainError::Mismatch(format!(
                "two nets supplied for depth {depth}"
            )));
        }
    }
    let mut required: Vec<usize> = (1..horizon).collect();
    if !use_true_leaf_rewards {
        required.push(horizon);
    }
    for depth in required {
        if !by_depth.contains_key(&depth) {
            return Err(TrainError::MissingDepth(depth));
        }
    }
    Ok(TrainedOracle {
        model,
        tilt,
        nets: by_depth,
        use_true_leaf_rewards,
        horizon,
        seed: 0,
    })
}

/// Train every required depth on one rollout dataset and assemble.
pub fn train_value_oracle(
    model: Arc<dyn BaseModel>,
    tilt: TiltSpec,
    data: &RolloutDataset,
    config: &TrainConfig,
    use_true_leaf_rewards: bool,
) -> Result<(TrainedOracle, Vec<TrainReport>), TrainError> {
    if data.horizon() != model.horizon() || data.alphabet_size() != model.alphabet_size() {
        return Err(TrainError::Mismatch(format!(
            "dataset shape ({}, {}) does not match model ({}, {})",
            data.horizon(),
            data.alphabet_size(),
            model.horizon(),
            model.alphabet_size()
        )));
    }
    let mut depths: Vec<usize> = (1..model.horizon()).collect();
    if !use_true_leaf_rewards {
        depths.push(model.horizon());
    }
    let mut nets = Vec::with_capacity(depths.len());
    let mut reports = Vec::with_capacity(depths.len());
    for depth in depths {
        let (net, report) = train_value_net(data, depth, config)?;
        nets.push(net);
        reports.push(report);
    }
    let mut oracle = assemble_trained_oracle(model, tilt, nets, use_true_leaf_rewards)?;
    oracle.seed = config.seed;
    Ok((oracle, reports))
}

#[derive(serde::Serialize, serde::Deserialize)]
struct NetHeader {
    depth: usize,
    width: usize,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct OracleHeader {
    format: String,
    horizon: usize,
    alphabet: usize,
    use_true_leaf_rewards: bool,
    seed: u64,
    nets: Vec<NetHeader>,
}

const FORMAT_TAG: &str = "mlp-value/1";

fn param_count(depth: usize, alphabet: usize, width: usize) -> usize {
    width * depth * alphabet + 2 * width + 1
}

/// One JSON header line, then each net's parameters as little-endian f64
/// in (w1, b1, w2, b2) order, nets in ascending depth.
pub fn save_oracle(oracle: &TrainedOracle, path: &Path) -> Result<(), TrainError> {
    let header = OracleHeader {
        format: FORMAT_TAG.to_string(),
        horizon: oracle.horizon,
        alphabet: oracle.model.alphabet_size(),
        use_true_leaf_rewards: oracle.use_true_leaf_rewards,
        seed: oracle.seed,
        nets: oracle
            .nets
            .values()
            .map(|n| NetHeader {
                depth: n.depth(),
                width: n.width(),
            })
            .collect(),
    };
    let mut bytes = serde_json::to_vec(&header)?;
    bytes.push(b'\n');
    for net in oracle.nets.values() {
        for p in net.flatten() {
            bytes.extend_from_slice(&p.to_le_bytes());
        }
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

/// Inverse of [`save_oracle`]. The model and tilt are reattached by the
/// caller; the file checks they have the shape it was trained against.
pub fn load_oracle(
    path: &Path,
    model: Arc<dyn BaseModel>,
    tilt: TiltSpec,
) -> Result<TrainedOracle, TrainError> {
    let bytes = std::fs::read(path)?;
    let newline = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| TrainError::BadHeader("missing header line".into()))?;
    let header: OracleHeader = serde_json::from_slice(&bytes[..newline])?;
    if header.format != FORMAT_TAG {
        return Err(TrainError::BadHeader(format!(
            "unknown format {:?}",
            header.format
        )));
    }
    if header.horizon != model.horizon() || header.alphabet != model.alphabet_size() {
        return Err(TrainError::Mismatch(format!(
            "file trained for horizon {} alphabet {}, model has {} and {}",
            header.horizon,
            header.alphabet,
            model.horizon(),
            model.alphabet_size()
        )));
    }
    let mut offset = newline + 1;
    let mut nets = Vec::with_capacity(header.nets.len());
    for nh in &header.nets {
        let count = param_count(nh.depth, header.alphabet, nh.width);
        let end = offset + 8 * count;
        if end > bytes.len() {
            return Err(TrainError::BadHeader("parameter block truncated".into()));
        }
        let flat: Vec<f64> = bytes[offset..end]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        nets.push(
            MlpValueNet::from_flat(nh.depth, header.alphabet, nh.width, &flat)
                .ok_or_else(|| TrainError::BadHeader("parameter block malformed".into()))?,
        );
        offset = end;
    }
    if offset != bytes.len() {
        return Err(TrainError::BadHeader("trailing bytes after parameters".into()));
    }
    let mut oracle = assemble_trained_oracle(model, tilt, nets, header.use_true_leaf_rewards)?;
    oracle.seed = header.seed;
    Ok(oracle)
}
