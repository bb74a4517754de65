use std::fmt;

/// An action sequence `y_{1:h}`, i.e. a node of the generation tree.
///
/// Actions are alphabet indices in `0..alphabet_size`. The empty sequence is
/// the root. `Ord` is lexicographic by action sequence (shorter prefixes sort
/// first), which is what deterministic tie-breaking relies on.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Seq(Vec<u32>);

impl Seq {
    pub fn root() -> Self {
        Seq(Vec::new())
    }

    pub fn from_actions(actions: impl Into<Vec<u32>>) -> Self {
        Seq(actions.into())
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn actions(&self) -> &[u32] {
        &self.0
    }

    /// Last action `y_h`, if any.
    pub fn last(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn child(&self, action: u32) -> Seq {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(action);
        Seq(v)
    }

    /// Parent `y_{1:h-1}`; `None` at the root.
    pub fn parent(&self) -> Option<Seq> {
        if self.0.is_empty() {
            None
        } else {
            Some(Seq(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// Prefix of the first `h` actions. Panics if `h` exceeds the depth.
    pub fn prefix(&self, h: usize) -> Seq {
        assert!(h <= self.0.len(), "prefix length {h} exceeds depth {}", self.0.len());
        Seq(self.0[..h].to_vec())
    }

    /// In-place push, for samplers that extend a working sequence.
    pub fn push(&mut self, action: u32) {
        self.0.push(action);
    }

    /// In-place pop (backtracking move). Panics at the root.
    pub fn pop(&mut self) -> u32 {
        self.0.pop().expect("pop at root")
    }
}

impl fmt::Debug for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "<root>");
        }
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "[{}]", parts.join("."))
    }
}

impl fmt::Display for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl From<&[u32]> for Seq {
    fn from(actions: &[u32]) -> Self {
        Seq(actions.to_vec())
    }
}

impl<const N: usize> From<[u32; N]> for Seq {
    fn from(actions: [u32; N]) -> Self {
        Seq(actions.to_vec())
    }
}
