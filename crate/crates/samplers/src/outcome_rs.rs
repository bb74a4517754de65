use rand::Rng;

use tree_core::{BaseModel, TiltSpec};

use crate::error::SamplerError;
use crate::record::RunRecord;

/// Draw whole sequences from the base model until one passes the accept
/// test: certainly for binary tilts with tau = 1, else with probability
/// tau / tau_max. Exact but slow: the acceptance rate is the normalizer
/// over tau_max.
///
/// `tau_max` may be omitted for binary and reward-based tilts, where the
/// bound is implied.
pub fn outcome_level_rs<R: Rng>(
    model: &dyn BaseModel,
    tilt: &TiltSpec,
    tau_max: Option<f64>,
    max_attempts: Option<u64>,
    rng: &mut R,
) -> Result<RunRecord, SamplerError> {
    let log_tau_max = match (tau_max, tilt.reward_form(), tilt.is_binary()) {
        (Some(t), _, _) => {
            assert!(t > 0.0);
            t.ln()
        }
        (None, _, true) => 0.0,
        (None, Some(rf), _) => rf.r_max / rf.beta,
        (None, None, false) => return Err(SamplerError::UnboundedTilt),
    };
    let horizon = model.horizon() as u64;

    let mut attempts = 0u64;
    loop {
        let y = model.sample_path(rng);
        attempts += 1;
        let accept = if tilt.is_binary() {
            tilt.log_tau(&y) == 0.0
        } else {
            rng.gen::<f64>().ln() < tilt.log_tau(&y) - log_tau_max
        };
        if accept {
            return Ok(RunRecord::finished(
                y,
                model.horizon(),
                attempts * horizon,
                attempts - 1,
                attempts,
            ));
        }
        if max_attempts.is_some_and(|cap| attempts >= cap) {
            return Ok(RunRecord::timed_out(
                y,
                model.horizon(),
                attempts * horizon,
                attempts,
                attempts,
            ));
        }
    }
}
