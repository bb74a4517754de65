use rand::Rng;

use tree_core::{normalized_from_logs, BaseModel, Seq};
use value_oracles::ValueOracle;

use crate::record::RunRecord;
use crate::util::sample_from_probs;

fn extend<R: Rng>(
    model: &dyn BaseModel,
    prefix: &Seq,
    len: usize,
    rng: &mut R,
) -> Seq {
    let mut y = prefix.clone();
    for _ in 0..len {
        let a = model.sample_action(&y, rng);
        y.push(a);
    }
    y
}

/// Decode in blocks: draw `n` continuations of `block_len` actions from the
/// base model and keep the one whose endpoint value is highest. Ties go to
/// the earliest draw; the last block shrinks to fit the horizon.
pub fn block_bon<R: Rng>(
    model: &dyn BaseModel,
    oracle: &dyn ValueOracle,
    block_len: usize,
    n: usize,
    rng: &mut R,
) -> RunRecord {
    assert!(block_len >= 1 && n >= 1);
    let horizon = model.horizon();
    let mut at = Seq::root();
    let mut steps = 0u64;
    let mut queries = 0u64;
    while at.depth() < horizon {
        let len = block_len.min(horizon - at.depth());
        let mut best: Option<(Seq, f64)> = None;
        for _ in 0..n {
            let cand = extend(model, &at, len, rng);
            let s = oracle.log_value(&cand);
            queries += 1;
            if best.as_ref().is_none_or(|(_, b)| s > *b) {
                best = Some((cand, s));
            }
        }
        at = best.expect("n >= 1").0;
        steps += (n * len) as u64;
    }
    RunRecord::finished(at, horizon, steps, 0, queries)
}

/// Like `block_bon`, but the continuation is drawn proportionally to the
/// endpoint values. When every candidate is dead the choice is uniform.
pub fn block_rs<R: Rng>(
    model: &dyn BaseModel,
    oracle: &dyn ValueOracle,
    block_len: usize,
    n: usize,
    rng: &mut R,
) -> RunRecord {
    assert!(block_len >= 1 && n >= 1);
    let horizon = model.horizon();
    let mut at = Seq::root();
    let mut steps = 0u64;
    let mut queries = 0u64;
    while at.depth() < horizon {
        let len = block_len.min(horizon - at.depth());
        let cands: Vec<Seq> = (0..n).map(|_| extend(model, &at, len, rng)).collect();
        let logs: Vec<f64> = cands.iter().map(|c| oracle.log_value(c)).collect();
        queries += n as u64;
        let i = match normalized_from_logs(&logs) {
            Some(probs) => sample_from_probs(&probs, rng).expect("normalized"),
            None => rng.gen_range(0..n),
        };
        at = cands.into_iter().nth(i).expect("i < n");
        steps += (n * len) as u64;
    }
    RunRecord::finished(at, horizon, steps, 0, queries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use tasks::abc_task;

    #[test]
    fn blocks_cover_the_horizon_with_truncation() {
        // Horizon 5 with block length 2: segments of 2, 2, 1.
        let task = abc_task(5, 0.0);
        let model = task.model();
        let oracle = task.oracle("exact").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rec = block_bon(model.as_ref(), oracle.as_ref(), 2, 4, &mut rng);
        assert!(rec.is_leaf);
        assert_eq!(rec.steps, (4 * 2 + 4 * 2 + 4 * 1) as u64);
        assert_eq!(rec.queries, 12);
    }

    #[test]
    fn resampled_blocks_prefer_live_continuations() {
        let task = abc_task(4, 0.0);
        let model = task.model();
        let oracle = task.oracle("exact").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut hits = 0;
        let runs = 400;
        for _ in 0..runs {
            let rec = block_rs(model.as_ref(), oracle.as_ref(), 2, 8, &mut rng);
            hits += (task.tilt().tau(&rec.terminal) == 1.0) as u32;
        }
        // Raw sampling scores (2/3)^4 ~ 20%; 8-way endpoint reweighing per
        // block has to do much better.
        assert!(hits > runs * 3 / 5, "hits = {hits}/{runs}");
    }
}
