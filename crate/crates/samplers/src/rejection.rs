use rand::Rng;

use crate::error::SamplerError;

#[derive(Clone, Debug)]
pub struct RejectionOutcome<T> {
    pub sample: T,
    /// Proposal draws consumed, normalizer phase included.
    pub draws: u64,
    /// True when every acceptance round failed and a raw proposal draw was
    /// returned instead.
    pub fallback: bool,
    pub z_hat: f64,
}

/// Sample approximately from the proposal reweighted by `g`, given a bound
/// `m` on sup g / E g. Uses n = ceil(4 m ln(4/delta)) draws to estimate the
/// normalizer, then up to n acceptance rounds with probability
/// g(z) / (z_hat * m), clipped at 1.
///
/// A nonpositive normalizer estimate triggers one fresh estimation pass;
/// a second failure reports the tilt as degenerate.
pub fn rejection_sampling<T, R: Rng + ?Sized>(
    mut propose: impl FnMut(&mut R) -> T,
    g: impl Fn(&T) -> f64,
    m: f64,
    delta: f64,
    rng: &mut R,
) -> Result<RejectionOutcome<T>, SamplerError> {
    assert!(m > 0.0);
    assert!(delta > 0.0 && delta < 1.0);
    let n = (4.0 * m * (4.0 / delta).ln()).ceil() as u64;
    let mut draws = 0u64;

    let mut z_hat = 0.0;
    for attempt in 0..2 {
        let mut acc = 0.0;
        for _ in 0..n {
            acc += g(&propose(rng));
        }
        draws += n;
        z_hat = acc / n as f64;
        if z_hat > 0.0 {
            break;
        }
        if attempt == 1 {
            return Err(SamplerError::DegenerateTilt);
        }
    }

    for _ in 0..n {
        let z = propose(rng);
        draws += 1;
        if rng.gen::<f64>() * z_hat * m < g(&z) {
            return Ok(RejectionOutcome { sample: z, draws, fallback: false, z_hat });
        }
    }
    let sample = propose(rng);
    draws += 1;
    Ok(RejectionOutcome { sample, draws, fallback: true, z_hat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn draw_budget_matches_the_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = rejection_sampling(
            |r: &mut ChaCha8Rng| r.gen_range(0..5u32),
            |&z| [1.0, 2.0, 3.0, 4.0, 0.0][z as usize],
            12.0,
            0.01,
            &mut rng,
        )
        .unwrap();
        // n = ceil(48 ln 400) = 288; at most 2n + 1 draws in total here.
        assert!(out.draws >= 289 && out.draws <= 577, "draws = {}", out.draws);
        assert!(!out.fallback);
    }

    #[test]
    fn zero_weight_is_degenerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let err = rejection_sampling(
            |r: &mut ChaCha8Rng| r.gen_range(0..5u32),
            |_| 0.0,
            4.0,
            0.1,
            &mut rng,
        )
        .unwrap_err();
        assert!(matches!(err, SamplerError::DegenerateTilt));
    }

    /// min(g / (z_hat m), 1) clipping: a single huge weight still accepts.
    #[test]
    fn acceptance_probability_clips_at_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = rejection_sampling(
            |r: &mut ChaCha8Rng| r.gen_range(0..2u32),
            |&z| if z == 0 { 100.0 } else { 0.0 },
            2.0,
            0.25,
            &mut rng,
        )
        .unwrap();
        assert_eq!(out.sample, 0);
    }
}
