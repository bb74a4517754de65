use tree_core::TreeError;

#[derive(Debug, thiserror::Error)]
pub enum SamplerError {
    /// The normalizer estimate came back nonpositive twice in a row: the
    /// weight function is (numerically) zero under the proposal.
    #[error("weight function vanishes under the proposal")]
    DegenerateTilt,
    /// Every candidate a selection rule saw was unusable.
    #[error("no complete sequences among the candidates")]
    NoLeafCandidates,
    #[error("tilt has no finite upper bound; pass one explicitly")]
    UnboundedTilt,
    #[error(transparent)]
    Tree(#[from] TreeError),
}
