use rand::Rng;

use tree_core::Seq;

use crate::error::SamplerError;
use crate::record::RunRecord;

/// Candidate budget that guarantees (1-delta) coverage of any event whose
/// density ratio against the proposal is at most `f`: ceil(f ln(1/delta)).
pub fn bon_sample_count(f: f64, delta: f64) -> u64 {
    assert!(f >= 1.0);
    assert!(delta > 0.0 && delta < 1.0);
    (f * (1.0 / delta).ln()).ceil() as u64
}

/// Draw `n` candidates from an arbitrary base sampler and keep the highest
/// scoring complete sequence; ties go to the earliest draw. Incomplete
/// candidates are discarded, and an entirely incomplete batch is an error.
pub fn best_of_n<R: Rng>(
    n: u64,
    horizon: usize,
    mut draw: impl FnMut(&mut R) -> Seq,
    score: impl Fn(&Seq) -> f64,
    rng: &mut R,
) -> Result<RunRecord, SamplerError> {
    assert!(n >= 1);
    let mut best: Option<(Seq, f64)> = None;
    for _ in 0..n {
        let cand = draw(rng);
        if cand.depth() != horizon {
            continue;
        }
        let s = score(&cand);
        if best.as_ref().is_none_or(|(_, b)| s > *b) {
            best = Some((cand, s));
        }
    }
    match best {
        Some((y, _)) => Ok(RunRecord::finished(y, horizon, n * horizon as u64, 0, n)),
        None => Err(SamplerError::NoLeafCandidates),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn budget_formula() {
        assert_eq!(bon_sample_count(20.0, 0.05), 60);
        assert_eq!(bon_sample_count(1.0, 0.5), 1);
    }

    #[test]
    fn picks_the_best_and_breaks_ties_by_draw_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut seq = 0u32;
        let rec = best_of_n(
            4,
            1,
            |_| {
                seq += 1;
                Seq::from_actions([seq - 1])
            },
            |y| if y.actions()[0] >= 2 { 1.0 } else { 0.0 },
            &mut rng,
        )
        .unwrap();
        // Candidates 2 and 3 tie at score 1; 2 came first.
        assert_eq!(rec.terminal, Seq::from_actions([2]));
        assert_eq!(rec.steps, 4);
    }

    #[test]
    fn incomplete_batches_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let err = best_of_n(3, 2, |_| Seq::root(), |_| 0.0, &mut rng).unwrap_err();
        assert!(matches!(err, SamplerError::NoLeafCandidates));
    }
}
