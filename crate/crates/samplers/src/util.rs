use rand::Rng;
use tree_core::normalized_from_logs;

/// Draw an index proportional to exp(logs), or None when all entries are
/// dead. Zero-probability entries are never selected.
pub(crate) fn sample_from_logs<R: Rng>(logs: &[f64], rng: &mut R) -> Option<usize> {
    let probs = normalized_from_logs(logs)?;
    sample_from_probs(&probs, rng)
}

pub(crate) fn sample_from_probs<R: Rng>(probs: &[f64], rng: &mut R) -> Option<usize> {
    let total: f64 = probs.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let r = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = None;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last_positive = Some(i);
        if r < acc {
            return Some(i);
        }
    }
    last_positive
}
