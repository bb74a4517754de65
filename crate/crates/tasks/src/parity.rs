use std::sync::Arc;

use tree_core::{BaseModel, Seq, TiltSpec};
use value_oracles::ClosedFormOracle;

use crate::instance::TaskInstance;

/// Binary strings in blocks of length `k`: within a block the first `k-1`
/// bits are free coin flips and the last is forced to their parity. A string
/// scores iff every forced bit lands on 0.
#[derive(Clone, Debug)]
pub struct ParityModel {
    k: usize,
    m: usize,
}

impl ParityModel {
    pub fn new(k: usize, m: usize) -> Self {
        assert!(k >= 2, "blocks need at least one free bit");
        assert!(m >= 1);
        ParityModel { k, m }
    }

    fn forced_bit(&self, prefix: &Seq) -> Option<u32> {
        let pos = prefix.depth() + 1;
        if pos % self.k != 0 {
            return None;
        }
        let block_start = pos - self.k; // index of the block's first bit
        let parity: u32 = prefix.actions()[block_start..].iter().sum::<u32>() & 1;
        Some(parity)
    }
}

impl BaseModel for ParityModel {
    fn alphabet_size(&self) -> usize {
        2
    }

    fn horizon(&self) -> usize {
        self.k * self.m
    }

    fn conditionals(&self, prefix: &Seq) -> Vec<f64> {
        assert!(prefix.depth() < self.horizon());
        match self.forced_bit(prefix) {
            Some(0) => vec![1.0, 0.0],
            Some(_) => vec![0.0, 1.0],
            None => vec![0.5, 0.5],
        }
    }
}

fn block_ends_clear(k: usize, y: &Seq, upto_block: usize) -> bool {
    (1..=upto_block).all(|t| y.actions()[t * k - 1] == 0)
}

/// Value of a reachable prefix. With `cur` = index of the block containing
/// the next position, each of the `m - cur` untouched blocks succeeds with
/// probability 1/2; the current block is resolved (block end seen), decided
/// (all free bits seen), or still open.
fn exact_log_value(k: usize, m: usize, y: &Seq) -> f64 {
    let h = y.depth();
    let ln2 = std::f64::consts::LN_2;
    if h == 0 {
        return -(m as f64) * ln2;
    }
    let cur = (h + k - 1) / k;
    if !block_ends_clear(k, y, cur - 1) {
        return f64::NEG_INFINITY;
    }
    let r = h % k;
    if r == 0 {
        if y.actions()[h - 1] != 0 {
            return f64::NEG_INFINITY;
        }
        (cur as f64 - m as f64) * ln2
    } else if r == k - 1 {
        let block_start = (cur - 1) * k;
        let parity: u32 = y.actions()[block_start..].iter().sum::<u32>() & 1;
        if parity != 0 {
            return f64::NEG_INFINITY;
        }
        (cur as f64 - m as f64) * ln2
    } else {
        (cur as f64 - m as f64 - 1.0) * ln2
    }
}

/// Like the exact value, but one position before each block end it ignores
/// the accumulated parity and charges the generic 1/2, as if the block were
/// still open. Exact everywhere else, leaves included.
fn ansatz_log_value(k: usize, m: usize, y: &Seq) -> f64 {
    let h = y.depth();
    if h > 0 && h % k == k - 1 {
        let ln2 = std::f64::consts::LN_2;
        let cur = (h + k - 1) / k;
        if !block_ends_clear(k, y, cur - 1) {
            return f64::NEG_INFINITY;
        }
        (cur as f64 - m as f64 - 1.0) * ln2
    } else {
        exact_log_value(k, m, y)
    }
}

pub fn parity_task(k: usize, m: usize) -> TaskInstance {
    let model = Arc::new(ParityModel::new(k, m));
    let tilt = TiltSpec::binary(move |y: &Seq| block_ends_clear(k, y, m));
    let exact = Arc::new(ClosedFormOracle::new(
        move |y| exact_log_value(k, m, y),
        true,
    ));
    let ansatz = Arc::new(ClosedFormOracle::new(
        move |y| ansatz_log_value(k, m, y),
        true,
    ));
    TaskInstance::new(format!("parity(k={k},m={m})"), model, tilt)
        .with_oracle("exact", exact)
        .with_oracle("ansatz", ansatz)
        .with_fact(
            "attempt_success_prob",
            0.5f64.powi(m as i32),
            "chance a raw rollout scores: each block's forced bit is 0 with \
             probability 1/2, independently",
        )
}
