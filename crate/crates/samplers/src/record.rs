use tree_core::Seq;

/// What one sampler invocation did and where it stopped.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub terminal: Seq,
    pub is_leaf: bool,
    pub steps: u64,
    pub restarts: u64,
    /// Oracle evaluations plus proposal draws consumed.
    pub queries: u64,
    pub timed_out: bool,
}

impl RunRecord {
    pub fn finished(terminal: Seq, horizon: usize, steps: u64, restarts: u64, queries: u64) -> Self {
        let is_leaf = terminal.depth() == horizon;
        RunRecord { terminal, is_leaf, steps, restarts, queries, timed_out: false }
    }

    pub fn timed_out(terminal: Seq, horizon: usize, steps: u64, restarts: u64, queries: u64) -> Self {
        let is_leaf = terminal.depth() == horizon;
        RunRecord { terminal, is_leaf, steps, restarts, queries, timed_out: true }
    }
}
