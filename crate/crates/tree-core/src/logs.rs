/// `ln(sum(exp(x_i)))`, stable under large negative inputs.
///
/// Returns `-inf` for an empty slice or when every entry is `-inf`.
pub fn logsumexp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        // All -inf (or empty). +inf inputs are a caller bug and propagate NaN.
        return m;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

/// Normalize log weights into a probability vector.
///
/// Entries of `-inf` map to exact zeros. Returns `None` when every weight is
/// zero (no distribution exists).
pub fn normalized_from_logs(logs: &[f64]) -> Option<Vec<f64>> {
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return None;
    }
    let unnorm: Vec<f64> = logs.iter().map(|&x| (x - m).exp()).collect();
    let total: f64 = unnorm.iter().sum();
    Some(unnorm.into_iter().map(|w| w / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logsumexp_matches_direct_sum() {
        let xs = [-1.0f64, -2.0, -3.0];
        let direct: f64 = xs.iter().map(|&x| x.exp()).sum::<f64>().ln();
        assert!((logsumexp(&xs) - direct).abs() < 1e-14);
    }

    #[test]
    fn logsumexp_survives_deep_underflow() {
        // Linear-space exp would underflow to 0 for both entries.
        let xs = [-800.0, -800.0];
        assert!((logsumexp(&xs) - (-800.0 + std::f64::consts::LN_2)).abs() < 1e-12);
    }

    #[test]
    fn normalization_keeps_exact_zeros() {
        let p = normalized_from_logs(&[0.0, f64::NEG_INFINITY, 0.0]).unwrap();
        assert_eq!(p[1], 0.0);
        assert!((p[0] - 0.5).abs() < 1e-15);
        assert!(normalized_from_logs(&[f64::NEG_INFINITY]).is_none());
    }
}
