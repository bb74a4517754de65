use rand::Rng;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean (sample standard deviation / sqrt(n)).
pub fn stderr(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt()
}

/// Nearest-rank percentile, `p` in [0, 1].
pub fn percentile(xs: &[f64], p: f64) -> f64 {
    assert!(!xs.is_empty());
    assert!((0.0..=1.0).contains(&p));
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let rank = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

/// Percentile bootstrap confidence interval for the mean.
pub fn bootstrap_mean_ci(
    xs: &[f64],
    n_boot: usize,
    level: f64,
    rng: &mut impl Rng,
) -> (f64, f64) {
    assert!(!xs.is_empty());
    assert!(level > 0.0 && level < 1.0);
    let mut boots: Vec<f64> = (0..n_boot)
        .map(|_| {
            let s: f64 = (0..xs.len()).map(|_| xs[rng.gen_range(0..xs.len())]).sum();
            s / xs.len() as f64
        })
        .collect();
    boots.sort_by(|a, b| a.total_cmp(b));
    let lo = percentile(&boots, (1.0 - level) / 2.0);
    let hi = percentile(&boots, (1.0 + level) / 2.0);
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basic_moments() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert!((stderr(&xs) - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-12);
        assert_eq!(percentile(&xs, 0.5), 2.0);
        assert_eq!(percentile(&xs, 1.0), 4.0);
    }

    #[test]
    fn bootstrap_brackets_the_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let xs: Vec<f64> = (0..200).map(|i| (i % 10) as f64).collect();
        let (lo, hi) = bootstrap_mean_ci(&xs, 500, 0.95, &mut rng);
        assert!(lo < 4.5 && 4.5 < hi, "({lo}, {hi})");
        assert!(hi - lo < 1.0);
    }
}
