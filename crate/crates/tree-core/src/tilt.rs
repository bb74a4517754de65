use std::sync::Arc;

use crate::seq::Seq;

/// Reward form of a tilt: `tau(y) = exp(reward(y) / beta)` with rewards in
/// `[0, r_max]`.
#[derive(Clone)]
pub struct RewardForm {
    reward: Arc<dyn Fn(&Seq) -> f64 + Send + Sync>,
    pub beta: f64,
    pub r_max: f64,
}

impl RewardForm {
    pub fn reward(&self, leaf: &Seq) -> f64 {
        (self.reward)(leaf)
    }
}

/// Leaf tilt `tau: A^H -> [0, inf)`. Carried in log space (`-inf` encodes
/// `tau = 0`). A binary tilt takes values in `{0, 1}` only; samplers use that
/// to enable exact accept/reject shortcuts.
#[derive(Clone)]
pub struct TiltSpec {
    log_tau: Arc<dyn Fn(&Seq) -> f64 + Send + Sync>,
    reward: Option<RewardForm>,
    binary: bool,
}

impl TiltSpec {
    /// Binary tilt from an acceptance predicate.
    pub fn binary(pred: impl Fn(&Seq) -> bool + Send + Sync + 'static) -> Self {
        TiltSpec {
            log_tau: Arc::new(move |y| if pred(y) { 0.0 } else { f64::NEG_INFINITY }),
            reward: None,
            binary: true,
        }
    }

    /// Tilt `tau = exp(reward / beta)` from a bounded reward and temperature.
    /// The exponential form holds exactly by construction.
    pub fn from_reward(
        reward: impl Fn(&Seq) -> f64 + Send + Sync + 'static,
        beta: f64,
        r_max: f64,
    ) -> Self {
        assert!(beta > 0.0, "temperature must be positive");
        assert!(r_max >= 0.0);
        let reward = Arc::new(reward);
        let r = Arc::clone(&reward);
        TiltSpec {
            log_tau: Arc::new(move |y| r(y) / beta),
            reward: Some(RewardForm { reward, beta, r_max }),
            binary: false,
        }
    }

    /// Raw tilt from a log-space function (`-inf` allowed, `NaN`/`+inf` not).
    pub fn from_log_fn(log_tau: impl Fn(&Seq) -> f64 + Send + Sync + 'static) -> Self {
        TiltSpec { log_tau: Arc::new(log_tau), reward: None, binary: false }
    }

    pub fn log_tau(&self, leaf: &Seq) -> f64 {
        (self.log_tau)(leaf)
    }

    pub fn tau(&self, leaf: &Seq) -> f64 {
        self.log_tau(leaf).exp()
    }

    pub fn is_binary(&self) -> bool {
        self.binary
    }

    pub fn reward_form(&self) -> Option<&RewardForm> {
        self.reward.as_ref()
    }
}
