use std::collections::BTreeMap;
use std::sync::Arc;

use tree_core::{exact_target, BaseModel, TargetDist, TiltSpec, TreeError};
use value_oracles::{OracleError, ValueOracle};

#[derive(Debug, thiserror::Error)]
pub enum TaskError {
    #[error("invalid task parameter: {0}")]
    InvalidParam(String),
    /// The fixed prompt cannot be completed to a positive-reward leaf within
    /// the horizon, so the target does not exist.
    #[error("prompt admits no valid completion: {0}")]
    DegeneratePrompt(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// A scalar the task knows exactly, with a one-line derivation note.
#[derive(Debug, Clone)]
pub struct Fact {
    pub value: f64,
    pub note: String,
}

/// A model/tilt pair plus named value functions and exact reference numbers.
pub struct TaskInstance {
    name: String,
    model: Arc<dyn BaseModel>,
    tilt: TiltSpec,
    oracles: BTreeMap<String, Arc<dyn ValueOracle>>,
    /// Analytic target, registered when enumeration would be wasteful or
    /// the support is sparse. `target()` falls back to enumeration.
    analytic_target: Option<TargetDist>,
    display: Option<Vec<String>>,
    facts: BTreeMap<String, Fact>,
}

impl TaskInstance {
    pub(crate) fn new(name: impl Into<String>, model: Arc<dyn BaseModel>, tilt: TiltSpec) -> Self {
        TaskInstance {
            name: name.into(),
            model,
            tilt,
            oracles: BTreeMap::new(),
            analytic_target: None,
            display: None,
            facts: BTreeMap::new(),
        }
    }

    pub(crate) fn with_oracle(
        mut self,
        name: impl Into<String>,
        oracle: Arc<dyn ValueOracle>,
    ) -> Self {
        self.oracles.insert(name.into(), oracle);
        self
    }

    pub(crate) fn with_target(mut self, target: TargetDist) -> Self {
        self.analytic_target = Some(target);
        self
    }

    pub(crate) fn with_display(mut self, symbols: Vec<String>) -> Self {
        self.display = Some(symbols);
        self
    }

    pub(crate) fn with_fact(
        mut self,
        key: impl Into<String>,
        value: f64,
        note: impl Into<String>,
    ) -> Self {
        self.facts.insert(
            key.into(),
            Fact {
                value,
                note: note.into(),
            },
        );
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn model(&self) -> &Arc<dyn BaseModel> {
        &self.model
    }

    pub fn tilt(&self) -> &TiltSpec {
        &self.tilt
    }

    pub fn horizon(&self) -> usize {
        self.model.horizon()
    }

    pub fn alphabet_size(&self) -> usize {
        self.model.alphabet_size()
    }

    pub fn oracle(&self, name: &str) -> Option<Arc<dyn ValueOracle>> {
        self.oracles.get(name).cloned()
    }

    pub fn oracle_names(&self) -> Vec<&str> {
        self.oracles.keys().map(|s| s.as_str()).collect()
    }

    /// The exact tilted target. Uses the registered analytic form when one
    /// exists, otherwise enumerates up to `cap` leaves.
    pub fn target(&self, cap: usize) -> Result<TargetDist, TreeError> {
        match &self.analytic_target {
            Some(t) => Ok(t.clone()),
            None => exact_target(self.model.as_ref(), &self.tilt, cap),
        }
    }

    pub fn has_analytic_target(&self) -> bool {
        self.analytic_target.is_some()
    }

    pub fn fact(&self, key: &str) -> Option<&Fact> {
        self.facts.get(key)
    }

    pub fn facts(&self) -> impl Iterator<Item = (&str, &Fact)> {
        self.facts.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Render a sequence with the task's display symbols, if it has any.
    pub fn render(&self, actions: &[u32]) -> String {
        match &self.display {
            Some(symbols) => actions
                .iter()
                .map(|&a| symbols[a as usize].as_str())
                .collect(),
            None => actions
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join("."),
        }
    }
}
