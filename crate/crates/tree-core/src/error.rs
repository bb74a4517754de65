use thiserror::Error;

#[derive(Debug, Error)]
pub enum TreeError {
    /// Enumeration touched more leaves than the configured cap. This is a hard
    /// error: closed forms or dynamic programs must be used instead.
    #[error("enumeration cap exceeded: more than {cap} leaves reachable")]
    CapExceeded { cap: usize },

    /// The tilt vanishes on every reachable leaf, so no target law exists.
    #[error("degenerate target: tilt is zero on every reachable leaf")]
    DegenerateTarget,

    #[error("sequence depth {depth} exceeds horizon {horizon}")]
    DepthExceedsHorizon { depth: usize, horizon: usize },
}
