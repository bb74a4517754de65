use std::collections::HashMap;
use std::sync::Arc;

use tree_core::{BaseModel, Seq, TargetDist, TiltSpec};
use value_oracles::{GeometricOracle, ValueOracle};

use crate::instance::{TaskError, TaskInstance};

pub const DYCK_ALPHABET: [&str; 8] = ["(", ")", "[", "]", "B", "E", "P", "S"];
pub const DYCK_GEOMETRIC_ALPHA: f64 = 0.75;
pub const DYCK_DEFAULT_PROMPT: &str = "B([(";

const OPEN_R: usize = 0;
const CLOSE_R: usize = 1;
const OPEN_S: usize = 2;
const CLOSE_S: usize = 3;
const END: usize = 5;

/// Bracket completion after a fixed prompt. Positions 1..H-1 of a scoring
/// string are brackets that keep the stack legal and empty it exactly at
/// position H-1; position H is the end marker.
///
/// The sampling policy tracks the stack: with probability 1-lambda it closes
/// the top bracket with probability min(1, d/r) (d open brackets, r bracket
/// slots left including the current one) and otherwise opens, square with
/// probability p_square; with probability lambda it emits one of the 8
/// symbols uniformly. Mismatched closes and non-brackets leave the tracked
/// stack unchanged.
#[derive(Clone)]
pub struct DyckModel {
    prompt_stack: Vec<u8>, // 0 = round, 1 = square, bottom to top
    horizon: usize,
    p_square: f64,
    lambda: f64,
}

impl DyckModel {
    pub fn new(
        prompt_stack: Vec<u8>,
        horizon: usize,
        p_square: f64,
        lambda: f64,
    ) -> Result<Self, TaskError> {
        if !(p_square > 0.0 && p_square < 1.0) {
            return Err(TaskError::InvalidParam(format!("p_square = {p_square}")));
        }
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(TaskError::InvalidParam(format!("lambda = {lambda}")));
        }
        let model = DyckModel { prompt_stack, horizon, p_square, lambda };
        if !model.completable(0, &model.prompt_stack) {
            return Err(TaskError::DegeneratePrompt(format!(
                "{} open brackets cannot balance in {} bracket slots",
                model.prompt_stack.len(),
                horizon.saturating_sub(1),
            )));
        }
        Ok(model)
    }

    /// Tracked stack plus strict validity after consuming `prefix`.
    fn replay(&self, prefix: &Seq) -> (Vec<u8>, bool) {
        let mut stack = self.prompt_stack.clone();
        let mut alive = true;
        for (i, &a) in prefix.actions().iter().enumerate() {
            if i + 1 == self.horizon {
                alive = alive && a as usize == END && stack.is_empty();
                continue;
            }
            match a as usize {
                OPEN_R => stack.push(0),
                OPEN_S => stack.push(1),
                CLOSE_R if stack.last() == Some(&0) => {
                    stack.pop();
                }
                CLOSE_S if stack.last() == Some(&1) => {
                    stack.pop();
                }
                _ => alive = false,
            }
        }
        (stack, alive)
    }

    /// Can a valid string still be reached: enough slots to close everything
    /// and an even number of slots to spare.
    fn completable(&self, depth: usize, stack: &[u8]) -> bool {
        if depth == self.horizon {
            return true;
        }
        let r = self.horizon - 1 - depth;
        stack.len() <= r && (r - stack.len()) % 2 == 0
    }

    fn conditionals_from_state(&self, depth: usize, stack: &[u8]) -> [f64; 8] {
        let mut out = [self.lambda / 8.0; 8];
        let clean = 1.0 - self.lambda;
        if depth + 1 == self.horizon {
            out[END] += clean;
            return out;
        }
        let r = (self.horizon - 1 - depth) as f64;
        let p_close = if stack.is_empty() {
            0.0
        } else {
            (stack.len() as f64 / r).min(1.0)
        };
        if let Some(&top) = stack.last() {
            let close = if top == 0 { CLOSE_R } else { CLOSE_S };
            out[close] += clean * p_close;
        }
        out[OPEN_R] += clean * (1.0 - p_close) * (1.0 - self.p_square);
        out[OPEN_S] += clean * (1.0 - p_close) * self.p_square;
        out
    }

    pub fn is_valid(&self, leaf: &Seq) -> bool {
        debug_assert_eq!(leaf.depth(), self.horizon);
        self.replay(leaf).1
    }

    /// Prefix that can still be extended to a valid string.
    pub fn is_viable(&self, prefix: &Seq) -> bool {
        let (stack, alive) = self.replay(prefix);
        alive && self.completable(prefix.depth(), &stack)
    }
}

impl BaseModel for DyckModel {
    fn alphabet_size(&self) -> usize {
        8
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn conditionals(&self, prefix: &Seq) -> Vec<f64> {
        assert!(prefix.depth() < self.horizon);
        let (stack, _) = self.replay(prefix);
        self.conditionals_from_state(prefix.depth(), &stack).to_vec()
    }
}

/// Success probabilities tabulated over (depth, stack) states. Only states
/// on valid-reachable paths are stored; everything else has value zero.
struct DyckExactOracle {
    model: DyckModel,
    memo: HashMap<(usize, Vec<u8>), f64>,
}

impl DyckExactOracle {
    fn new(model: DyckModel) -> Self {
        let mut memo = HashMap::new();
        let mut stack = model.prompt_stack.clone();
        build(&model, 0, &mut stack, &mut memo);
        DyckExactOracle { model, memo }
    }
}

fn build(
    model: &DyckModel,
    depth: usize,
    stack: &mut Vec<u8>,
    memo: &mut HashMap<(usize, Vec<u8>), f64>,
) -> f64 {
    if let Some(&v) = memo.get(&(depth, stack.clone())) {
        return v;
    }
    let v = if !model.completable(depth, stack) {
        0.0
    } else if depth == model.horizon {
        1.0
    } else {
        let cond = model.conditionals_from_state(depth, stack);
        if depth + 1 == model.horizon {
            // Stack is empty here (completability), so E finishes validly.
            cond[END] * build(model, depth + 1, stack, memo)
        } else {
            let mut acc = 0.0;
            if let Some(&top) = stack.last() {
                let close = if top == 0 { CLOSE_R } else { CLOSE_S };
                let popped = stack.pop().expect("nonempty");
                acc += cond[close] * build(model, depth + 1, stack, memo);
                stack.push(popped);
            }
            for (open, kind) in [(OPEN_R, 0u8), (OPEN_S, 1u8)] {
                stack.push(kind);
                acc += cond[open] * build(model, depth + 1, stack, memo);
                stack.pop();
            }
            acc
        }
    };
    memo.insert((depth, stack.clone()), v);
    v
}

impl ValueOracle for DyckExactOracle {
    fn log_value(&self, y: &Seq) -> f64 {
        let (stack, alive) = self.model.replay(y);
        if !alive || !self.model.completable(y.depth(), &stack) {
            return f64::NEG_INFINITY;
        }
        let v = self.memo.get(&(y.depth(), stack)).copied();
        debug_assert!(v.is_some(), "viable state missing from the table");
        v.map_or(f64::NEG_INFINITY, f64::ln)
    }

    fn exact_at_leaves(&self) -> bool {
        true
    }
}

/// Exact target via the valid strings: walk only validity-preserving
/// symbols, accumulating the real (noise-included) path density.
fn analytic_target(model: &DyckModel) -> TargetDist {
    let mut leaves = Vec::new();
    let mut stack = model.prompt_stack.clone();
    let mut actions = Vec::new();
    walk_valid(model, &mut stack, &mut actions, 0.0, &mut leaves);
    TargetDist::from_log_weights(leaves, model.horizon).expect("prompt checked completable")
}

fn walk_valid(
    model: &DyckModel,
    stack: &mut Vec<u8>,
    actions: &mut Vec<u32>,
    logw: f64,
    leaves: &mut Vec<(Seq, f64)>,
) {
    let depth = actions.len();
    if !model.completable(depth, stack) {
        return;
    }
    if depth == model.horizon {
        leaves.push((Seq::from_actions(actions.clone()), logw));
        return;
    }
    let cond = model.conditionals_from_state(depth, stack);
    if depth + 1 == model.horizon {
        actions.push(END as u32);
        walk_valid(model, stack, actions, logw + cond[END].ln(), leaves);
        actions.pop();
        return;
    }
    if let Some(&top) = stack.last() {
        let close = if top == 0 { CLOSE_R } else { CLOSE_S };
        let popped = stack.pop().expect("nonempty");
        actions.push(close as u32);
        walk_valid(model, stack, actions, logw + cond[close].ln(), leaves);
        actions.pop();
        stack.push(popped);
    }
    for (open, kind) in [(OPEN_R, 0u8), (OPEN_S, 1u8)] {
        stack.push(kind);
        actions.push(open as u32);
        walk_valid(model, stack, actions, logw + cond[open].ln(), leaves);
        actions.pop();
        stack.pop();
    }
}

/// Bracket completion for the standard prompt: three dangling opens.
pub fn dyck_task(horizon: usize, p_square: f64, lambda: f64) -> Result<TaskInstance, TaskError> {
    dyck_task_with_prompt(horizon, p_square, lambda, DYCK_DEFAULT_PROMPT)
}

pub fn dyck_task_with_prompt(
    horizon: usize,
    p_square: f64,
    lambda: f64,
    prompt: &str,
) -> Result<TaskInstance, TaskError> {
    dyck_task_custom(horizon, p_square, lambda, prompt, DYCK_GEOMETRIC_ALPHA)
}

/// Fully parameterized builder; also sets the heuristic oracle's decay.
pub fn dyck_task_custom(
    horizon: usize,
    p_square: f64,
    lambda: f64,
    prompt: &str,
    alpha: f64,
) -> Result<TaskInstance, TaskError> {
    let prompt_stack = parse_prompt(prompt)?;
    let model = DyckModel::new(prompt_stack, horizon, p_square, lambda)?;
    let target = analytic_target(&model);
    let exact = Arc::new(DyckExactOracle::new(model.clone()));
    let viability_model = model.clone();
    let geometric = Arc::new(GeometricOracle::new(
        move |y: &Seq| viability_model.is_viable(y),
        alpha,
        horizon,
    )?);
    let validity_model = model.clone();
    let tilt = TiltSpec::binary(move |y: &Seq| validity_model.is_valid(y));
    let support = target.support_len() as f64;
    Ok(TaskInstance::new(
        format!("dyck(h={horizon},p_square={p_square},lambda={lambda},prompt={prompt})"),
        Arc::new(model),
        tilt,
    )
    .with_display(DYCK_ALPHABET.iter().map(|s| s.to_string()).collect())
    .with_oracle("exact", exact)
    .with_oracle("geometric", geometric)
    .with_target(target)
    .with_fact("target_support", support, "number of valid completions"))
}

fn parse_prompt(prompt: &str) -> Result<Vec<u8>, TaskError> {
    let mut chars = prompt.chars();
    if chars.next() != Some('B') {
        return Err(TaskError::InvalidParam(format!(
            "prompt must start with B: {prompt:?}"
        )));
    }
    let mut stack = Vec::new();
    for c in chars {
        match c {
            '(' => stack.push(0),
            '[' => stack.push(1),
            ')' if stack.last() == Some(&0) => {
                stack.pop();
            }
            ']' if stack.last() == Some(&1) => {
                stack.pop();
            }
            _ => {
                return Err(TaskError::InvalidParam(format!(
                    "bad prompt symbol {c:?} in {prompt:?}"
                )))
            }
        }
    }
    Ok(stack)
}
