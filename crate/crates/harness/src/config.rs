use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use samplers::{ChildSampling, OutputTime};
use tasks::{
    abc_task, beam_counterexample_task, delayed_task, dyck_task_custom, kl_abc_task, parity_task,
    TaskInstance, DYCK_DEFAULT_PROMPT, DYCK_GEOMETRIC_ALPHA,
};
use tree_core::TiltSpec;
use value_oracles::{ValueOracle, WithExactLeaves};
use value_training::load_oracle;

pub const TASK_NAMES: [&str; 6] = ["abc", "delayed", "kl_abc", "parity", "dyck", "beam_cx"];

pub const SAMPLER_NAMES: [&str; 10] = [
    "vgb",
    "vgb_first_leaf",
    "vgb_momentum",
    "alrs",
    "alrs_large",
    "outcome_rs",
    "block_bon",
    "block_rs",
    "bon",
    "beam",
];

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config is not valid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("oracle file: {0}")]
    OracleFile(#[from] value_training::TrainError),
}

fn invalid(path: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        path: path.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskConfig {
    pub name: String,
    #[serde(rename = "H")]
    pub horizon: Option<usize>,
    pub eps_v: Option<f64>,
    pub eps_q: Option<f64>,
    pub beta: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    #[serde(rename = "M")]
    pub m: Option<usize>,
    pub p_square: Option<f64>,
    pub lambda: Option<f64>,
    pub prompt: Option<String>,
    pub alpha: Option<f64>,
}

impl TaskConfig {
    pub fn named(name: &str) -> Self {
        TaskConfig {
            name: name.to_string(),
            horizon: None,
            eps_v: None,
            eps_q: None,
            beta: None,
            k: None,
            m: None,
            p_square: None,
            lambda: None,
            prompt: None,
            alpha: None,
        }
    }
}

#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default = "default_oracle_name")]
    pub name: String,
    /// Serialized net stack, for name = "trained".
    pub path: Option<PathBuf>,
    /// Replace the oracle's leaf values with the true terminal weights.
    pub exact_leaves: Option<bool>,
}

fn default_oracle_name() -> String {
    "exact".to_string()
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            name: default_oracle_name(),
            path: None,
            exact_leaves: None,
        }
    }
}

#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub name: String,
    #[serde(rename = "T")]
    pub t: Option<u64>,
    pub output: Option<String>,
    pub step_cap: Option<u64>,
    pub candidates: Option<usize>,
    pub m_bound: Option<f64>,
    pub delta: Option<f64>,
    pub block_len: Option<usize>,
    pub n: Option<u64>,
    pub width: Option<usize>,
    pub tau_max: Option<f64>,
    pub max_attempts: Option<u64>,
}

impl SamplerConfig {
    pub fn named(name: &str) -> Self {
        SamplerConfig {
            name: name.to_string(),
            t: None,
            output: None,
            step_cap: None,
            candidates: None,
            m_bound: None,
            delta: None,
            block_len: None,
            n: None,
            width: None,
            tau_max: None,
            max_attempts: None,
        }
    }
}

#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: TaskConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    pub sampler: SamplerConfig,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<String>,
    /// Replicates split into this many equal seed groups; distribution
    /// metrics are averaged across groups with a standard error.
    #[serde(default = "default_seed_groups")]
    pub seed_groups: usize,
    pub out: Option<PathBuf>,
    /// Ratio for the coverage-quantile metric.
    pub cov_ratio: Option<f64>,
}

fn default_replicates() -> usize {
    1
}

fn default_seed_groups() -> usize {
    1
}

fn default_metrics() -> Vec<String> {
    ["tv", "kl", "steps_mean", "nonleaf_fraction"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MetricName {
    Tv,
    Kl,
    Chi2,
    CovQ,
    KlRegret,
    Accuracy,
    DistinctCorrect,
    HistL1,
    NonleafFraction,
    StepsMean,
    StepsP50,
    RestartsMean,
}

impl MetricName {
    pub const ALL: [MetricName; 12] = [
        MetricName::Tv,
        MetricName::Kl,
        MetricName::Chi2,
        MetricName::CovQ,
        MetricName::KlRegret,
        MetricName::Accuracy,
        MetricName::DistinctCorrect,
        MetricName::HistL1,
        MetricName::NonleafFraction,
        MetricName::StepsMean,
        MetricName::StepsP50,
        MetricName::RestartsMean,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MetricName::Tv => "tv",
            MetricName::Kl => "kl",
            MetricName::Chi2 => "chi2",
            MetricName::CovQ => "cov_q",
            MetricName::KlRegret => "kl_regret",
            MetricName::Accuracy => "accuracy",
            MetricName::DistinctCorrect => "distinct_correct",
            MetricName::HistL1 => "hist_l1",
            MetricName::NonleafFraction => "nonleaf_fraction",
            MetricName::StepsMean => "steps_mean",
            MetricName::StepsP50 => "steps_p50",
            MetricName::RestartsMean => "restarts_mean",
        }
    }

    /// Computed on the pooled leaf law of a seed group rather than per run.
    pub fn is_distributional(&self) -> bool {
        matches!(
            self,
            MetricName::Tv
                | MetricName::Kl
                | MetricName::Chi2
                | MetricName::CovQ
                | MetricName::KlRegret
                | MetricName::DistinctCorrect
                | MetricName::HistL1
                | MetricName::NonleafFraction
        )
    }
}

impl FromStr for MetricName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        MetricName::ALL
            .iter()
            .find(|m| m.as_str() == s)
            .copied()
            .ok_or_else(|| {
                let names: Vec<&str> = MetricName::ALL.iter().map(|m| m.as_str()).collect();
                format!("unknown metric {s:?} (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone)]
pub enum SamplerSpec {
    Vgb { t: u64, output: OutputTime },
    VgbFirstLeaf { mode: ChildSampling, step_cap: u64 },
    VgbMomentum { step_cap: u64 },
    Alrs { max_steps: Option<u64> },
    AlrsLarge { m: f64, delta: f64, max_steps: Option<u64> },
    OutcomeRs { tau_max: Option<f64>, max_attempts: Option<u64> },
    BlockBon { block_len: usize, n: usize },
    BlockRs { block_len: usize, n: usize },
    Bon { n: u64 },
    Beam { width: usize },
}

/// A config with every name resolved and every default filled.
pub struct Resolved {
    pub task: TaskInstance,
    /// Short registry name ("abc"), as distinct from the instance label.
    pub task_name: String,
    pub oracle: Arc<dyn ValueOracle>,
    pub oracle_name: String,
    pub sampler: SamplerSpec,
    pub sampler_name: String,
    pub replicates: usize,
    pub seed_groups: usize,
    pub seed: u64,
    pub metrics: Vec<MetricName>,
    pub out: Option<PathBuf>,
    pub cov_ratio: Option<f64>,
    /// Canonical task + sampler parameters, for the CSV params_json column.
    pub params_json: String,
}

/// Walk length for a chi-square-1e-3 leaf conditional; see
/// `samplers::thm_step_count` for the scaling.
pub fn default_walk_steps(horizon: usize, kappa: f64) -> u64 {
    samplers::thm_step_count(kappa.max(1.0), 1.0, horizon, 1e-3)
}

struct BuiltTask {
    task: TaskInstance,
    horizon: usize,
    params: BTreeMap<String, serde_json::Value>,
    /// Oracle-declared multiplicative error, for walk-length defaults.
    kappa_hint: f64,
}

fn num(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v)
        .map(serde_json::Value::Number)
        .expect("finite parameter")
}

fn build_task(cfg: &TaskConfig, oracle_name: &str) -> Result<BuiltTask, ConfigError> {
    let mut params: BTreeMap<String, serde_json::Value> = BTreeMap::new();
    params.insert("name".into(), cfg.name.clone().into());

    // Reject parameters that the chosen task does not consume.
    let allowed: &[&str] = match cfg.name.as_str() {
        "abc" => &["H", "eps_v"],
        "delayed" => &["H"],
        "kl_abc" => &["H", "eps_q", "beta"],
        "parity" => &["K", "M"],
        "dyck" => &["H", "p_square", "lambda", "prompt", "alpha"],
        "beam_cx" => &["H"],
        other => {
            return Err(invalid(
                "task.name",
                format!("unknown task {other:?} (expected one of {})", TASK_NAMES.join(", ")),
            ))
        }
    };
    let supplied: [(&str, bool); 9] = [
        ("H", cfg.horizon.is_some()),
        ("eps_v", cfg.eps_v.is_some()),
        ("eps_q", cfg.eps_q.is_some()),
        ("beta", cfg.beta.is_some()),
        ("K", cfg.k.is_some()),
        ("M", cfg.m.is_some()),
        ("p_square", cfg.p_square.is_some()),
        ("lambda", cfg.lambda.is_some()),
        ("prompt", cfg.prompt.is_some()),
    ];
    for (field, present) in supplied {
        if present && !allowed.contains(&field) {
            return Err(invalid(
                &format!("task.{field}"),
                format!("not a parameter of task {:?}", cfg.name),
            ));
        }
    }
    if cfg.alpha.is_some() && cfg.name != "dyck" {
        return Err(invalid("task.alpha", format!("not a parameter of task {:?}", cfg.name)));
    }

    match cfg.name.as_str() {
        "abc" => {
            let h = cfg.horizon.unwrap_or(6);
            if h < 2 {
                return Err(invalid("task.H", "abc needs a horizon of at least 2"));
            }
            let eps = cfg.eps_v.unwrap_or(0.3);
            if eps < 0.0 {
                return Err(invalid("task.eps_v", "perturbation must be nonnegative"));
            }
            params.insert("H".into(), h.into());
            params.insert("eps_v".into(), num(eps));
            Ok(BuiltTask {
                task: abc_task(h, eps),
                horizon: h,
                params,
                kappa_hint: if oracle_name == "perturbed" { 1.0 + eps } else { 1.0 },
            })
        }
        "delayed" => {
            let h = cfg.horizon.unwrap_or(6);
            if h < 1 {
                return Err(invalid("task.H", "horizon must be positive"));
            }
            params.insert("H".into(), h.into());
            Ok(BuiltTask {
                task: delayed_task(h),
                horizon: h,
                params,
                kappa_hint: 1.0,
            })
        }
        "kl_abc" => {
            let h = cfg.horizon.unwrap_or(6);
            if h < 2 {
                return Err(invalid("task.H", "kl_abc needs a horizon of at least 2"));
            }
            let eps_q = cfg.eps_q.unwrap_or(0.25);
            if eps_q < 0.0 {
                return Err(invalid("task.eps_q", "perturbation must be nonnegative"));
            }
            let beta = cfg.beta.unwrap_or(0.25);
            if beta <= 0.0 {
                return Err(invalid("task.beta", "regularization scale must be positive"));
            }
            params.insert("H".into(), h.into());
            params.insert("eps_q".into(), num(eps_q));
            params.insert("beta".into(), num(beta));
            Ok(BuiltTask {
                task: kl_abc_task(h, eps_q, beta),
                horizon: h,
                params,
                kappa_hint: if oracle_name == "q_perturbed" {
                    (eps_q / beta).exp()
                } else {
                    1.0
                },
            })
        }
        "parity" => {
            let k = cfg.k.unwrap_or(4);
            let m = cfg.m.unwrap_or(3);
            if k < 2 {
                return Err(invalid("task.K", "block length must be at least 2"));
            }
            if m < 1 {
                return Err(invalid("task.M", "block count must be at least 1"));
            }
            params.insert("K".into(), k.into());
            params.insert("M".into(), m.into());
            Ok(BuiltTask {
                task: parity_task(k, m),
                horizon: k * m,
                params,
                kappa_hint: 1.0,
            })
        }
        "dyck" => {
            let h = cfg.horizon.unwrap_or(8);
            let p_square = cfg.p_square.unwrap_or(0.8);
            if !(0.0 < p_square && p_square < 1.0) {
                return Err(invalid("task.p_square", "must lie strictly between 0 and 1"));
            }
            let lambda = cfg.lambda.unwrap_or(0.1);
            if !(0.0..1.0).contains(&lambda) {
                return Err(invalid("task.lambda", "must lie in [0, 1)"));
            }
            let alpha = cfg.alpha.unwrap_or(DYCK_GEOMETRIC_ALPHA);
            if !(0.0 < alpha && alpha <= 1.0) {
                return Err(invalid("task.alpha", "must lie in (0, 1]"));
            }
            let prompt = cfg.prompt.as_deref().unwrap_or(DYCK_DEFAULT_PROMPT);
            let task = dyck_task_custom(h, p_square, lambda, prompt, alpha)
                .map_err(|e| invalid("task", e.to_string()))?;
            params.insert("H".into(), h.into());
            params.insert("p_square".into(), num(p_square));
            params.insert("lambda".into(), num(lambda));
            params.insert("alpha".into(), num(alpha));
            params.insert("prompt".into(), prompt.into());
            Ok(BuiltTask {
                task,
                horizon: h,
                params,
                kappa_hint: 1.0,
            })
        }
        "beam_cx" => {
            let h = cfg.horizon.unwrap_or(8);
            if h < 4 || h % 2 != 0 {
                return Err(invalid("task.H", "beam_cx needs an even horizon of at least 4"));
            }
            params.insert("H".into(), h.into());
            Ok(BuiltTask {
                task: beam_counterexample_task(h),
                horizon: h,
                params,
                kappa_hint: 1.0,
            })
        }
        _ => unreachable!("name checked above"),
    }
}

fn build_oracle(
    cfg: &OracleConfig,
    task: &TaskInstance,
    tilt: &TiltSpec,
) -> Result<Arc<dyn ValueOracle>, ConfigError> {
    let base: Arc<dyn ValueOracle> = if cfg.name == "trained" {
        let path = cfg
            .path
            .as_ref()
            .ok_or_else(|| invalid("oracle.path", "a trained oracle needs a file path"))?;
        Arc::new(load_oracle(path, task.model().clone(), tilt.clone())?)
    } else {
        if cfg.path.is_some() {
            return Err(invalid("oracle.path", "only trained oracles load from a file"));
        }
        task.oracle(&cfg.name).ok_or_else(|| {
            invalid(
                "oracle.name",
                format!(
                    "task {:?} has no oracle {:?} (available: {}, trained)",
                    task.name(),
                    cfg.name,
                    task.oracle_names().join(", ")
                ),
            )
        })?
    };
    Ok(if cfg.exact_leaves == Some(true) {
        Arc::new(WithExactLeaves::new(base, tilt.clone(), task.horizon()))
    } else {
        base
    })
}

fn build_sampler(
    cfg: &SamplerConfig,
    horizon: usize,
    kappa_hint: f64,
    params: &mut BTreeMap<String, serde_json::Value>,
) -> Result<SamplerSpec, ConfigError> {
    params.insert("name".into(), cfg.name.clone().into());

    let allowed: &[&str] = match cfg.name.as_str() {
        "vgb" => &["T", "output"],
        "vgb_first_leaf" => &["step_cap", "candidates"],
        "vgb_momentum" => &["step_cap"],
        "alrs" => &["step_cap"],
        "alrs_large" => &["m_bound", "delta", "step_cap"],
        "outcome_rs" => &["tau_max", "max_attempts"],
        "block_bon" | "block_rs" => &["block_len", "n"],
        "bon" => &["n"],
        "beam" => &["width"],
        other => {
            return Err(invalid(
                "sampler.name",
                format!(
                    "unknown sampler {other:?} (expected one of {})",
                    SAMPLER_NAMES.join(", ")
                ),
            ))
        }
    };
    let supplied: [(&str, bool); 11] = [
        ("T", cfg.t.is_some()),
        ("output", cfg.output.is_some()),
        ("step_cap", cfg.step_cap.is_some()),
        ("candidates", cfg.candidates.is_some()),
        ("m_bound", cfg.m_bound.is_some()),
        ("delta", cfg.delta.is_some()),
        ("block_len", cfg.block_len.is_some()),
        ("n", cfg.n.is_some()),
        ("width", cfg.width.is_some()),
        ("tau_max", cfg.tau_max.is_some()),
        ("max_attempts", cfg.max_attempts.is_some()),
    ];
    for (field, present) in supplied {
        if present && !allowed.contains(&field) {
            return Err(invalid(
                &format!("sampler.{field}"),
                format!("not a parameter of sampler {:?}", cfg.name),
            ));
        }
    }

    match cfg.name.as_str() {
        "vgb" => {
            let t = cfg.t.unwrap_or_else(|| default_walk_steps(horizon, kappa_hint));
            if t == 0 {
                return Err(invalid("sampler.T", "walk length must be positive"));
            }
            let output = match cfg.output.as_deref() {
                None | Some("last") => OutputTime::Last,
                Some("uniform") => OutputTime::Uniform,
                Some(other) => {
                    return Err(invalid(
                        "sampler.output",
                        format!("unknown output time {other:?} (expected last or uniform)"),
                    ))
                }
            };
            params.insert("T".into(), t.into());
            params.insert(
                "output".into(),
                match output {
                    OutputTime::Last => "last",
                    OutputTime::Uniform => "uniform",
                }
                .into(),
            );
            Ok(SamplerSpec::Vgb { t, output })
        }
        "vgb_first_leaf" => {
            let step_cap = cfg
                .step_cap
                .unwrap_or_else(|| default_walk_steps(horizon, kappa_hint));
            let mode = match cfg.candidates {
                None => ChildSampling::Enumerate,
                Some(k) if k >= 1 => ChildSampling::Candidates(k),
                Some(_) => return Err(invalid("sampler.candidates", "needs at least one candidate")),
            };
            params.insert("step_cap".into(), step_cap.into());
            if let ChildSampling::Candidates(k) = mode {
                params.insert("candidates".into(), k.into());
            }
            Ok(SamplerSpec::VgbFirstLeaf { mode, step_cap })
        }
        "vgb_momentum" => {
            let step_cap = cfg
                .step_cap
                .unwrap_or_else(|| default_walk_steps(horizon, kappa_hint));
            params.insert("step_cap".into(), step_cap.into());
            Ok(SamplerSpec::VgbMomentum { step_cap })
        }
        "alrs" => {
            if let Some(cap) = cfg.step_cap {
                params.insert("step_cap".into(), cap.into());
            }
            Ok(SamplerSpec::Alrs {
                max_steps: cfg.step_cap,
            })
        }
        "alrs_large" => {
            let m = cfg
                .m_bound
                .ok_or_else(|| invalid("sampler.m_bound", "alrs_large needs a tilt bound"))?;
            if m < 1.0 {
                return Err(invalid("sampler.m_bound", "the tilt bound is at least 1"));
            }
            let delta = cfg.delta.unwrap_or(0.01);
            if !(0.0 < delta && delta < 1.0) {
                return Err(invalid("sampler.delta", "must lie strictly between 0 and 1"));
            }
            params.insert("m_bound".into(), num(m));
            params.insert("delta".into(), num(delta));
            if let Some(cap) = cfg.step_cap {
                params.insert("step_cap".into(), cap.into());
            }
            Ok(SamplerSpec::AlrsLarge {
                m,
                delta,
                max_steps: cfg.step_cap,
            })
        }
        "outcome_rs" => {
            if let Some(t) = cfg.tau_max {
                if t <= 0.0 {
                    return Err(invalid("sampler.tau_max", "must be positive"));
                }
                params.insert("tau_max".into(), num(t));
            }
            if let Some(a) = cfg.max_attempts {
                params.insert("max_attempts".into(), a.into());
            }
            Ok(SamplerSpec::OutcomeRs {
                tau_max: cfg.tau_max,
                max_attempts: cfg.max_attempts,
            })
        }
        "block_bon" | "block_rs" => {
            let block_len = cfg.block_len.unwrap_or(4);
            if block_len == 0 {
                return Err(invalid("sampler.block_len", "blocks must be nonempty"));
            }
            let n = cfg.n.unwrap_or(8) as usize;
            if n == 0 {
                return Err(invalid("sampler.n", "needs at least one candidate"));
            }
            params.insert("block_len".into(), block_len.into());
            params.insert("n".into(), n.into());
            Ok(if cfg.name == "block_bon" {
                SamplerSpec::BlockBon { block_len, n }
            } else {
                SamplerSpec::BlockRs { block_len, n }
            })
        }
        "bon" => {
            let n = cfg.n.unwrap_or(60);
            if n == 0 {
                return Err(invalid("sampler.n", "needs at least one candidate"));
            }
            params.insert("n".into(), n.into());
            Ok(SamplerSpec::Bon { n })
        }
        "beam" => {
            let width = cfg.width.unwrap_or(32);
            if width == 0 {
                return Err(invalid("sampler.width", "needs at least one beam"));
            }
            params.insert("width".into(), width.into());
            Ok(SamplerSpec::Beam { width })
        }
        _ => unreachable!("name checked above"),
    }
}

pub fn resolve(cfg: &ExperimentConfig) -> Result<Resolved, ConfigError> {
    let built = build_task(&cfg.task, &cfg.oracle.name)?;
    let oracle = build_oracle(&cfg.oracle, &built.task, built.task.tilt())?;

    if cfg.replicates < 1 {
        return Err(invalid("replicates", "at least one replicate is required"));
    }
    if cfg.seed_groups < 1 {
        return Err(invalid("seed_groups", "at least one group is required"));
    }
    if cfg.replicates % cfg.seed_groups != 0 {
        return Err(invalid(
            "seed_groups",
            format!(
                "{} replicates do not split into {} equal groups",
                cfg.replicates, cfg.seed_groups
            ),
        ));
    }

    let mut metrics = Vec::with_capacity(cfg.metrics.len());
    for (i, m) in cfg.metrics.iter().enumerate() {
        metrics.push(
            MetricName::from_str(m).map_err(|e| invalid(&format!("metrics[{i}]"), e))?,
        );
    }
    if let Some(r) = cfg.cov_ratio {
        if r <= 0.0 {
            return Err(invalid("cov_ratio", "must be positive"));
        }
    } else if metrics.contains(&MetricName::CovQ) {
        return Err(invalid("cov_ratio", "the cov_q metric needs a ratio"));
    }

    let mut task_params = built.params;
    let mut sampler_params = BTreeMap::new();
    let sampler = build_sampler(
        &cfg.sampler,
        built.horizon,
        built.kappa_hint,
        &mut sampler_params,
    )?;

    sampler_params.remove("name");
    let mut oracle_desc = serde_json::Map::new();
    oracle_desc.insert("name".into(), cfg.oracle.name.clone().into());
    if let Some(p) = &cfg.oracle.path {
        oracle_desc.insert("path".into(), p.display().to_string().into());
    }
    if cfg.oracle.exact_leaves == Some(true) {
        oracle_desc.insert("exact_leaves".into(), true.into());
    }

    task_params.remove("name");
    let params_json = serde_json::json!({
        "task": task_params,
        "oracle": oracle_desc,
        "sampler": sampler_params,
    })
    .to_string();

    Ok(Resolved {
        task_name: cfg.task.name.clone(),
        oracle,
        oracle_name: cfg.oracle.name.clone(),
        sampler,
        sampler_name: cfg.sampler.name.clone(),
        replicates: cfg.replicates,
        seed_groups: cfg.seed_groups,
        seed: cfg.seed,
        metrics,
        out: cfg.out.clone(),
        cov_ratio: cfg.cov_ratio,
        params_json,
        task: built.task,
    })
}

/// Parse raw JSON and resolve every name and default.
pub fn validate_config(raw: &str) -> Result<Resolved, ConfigError> {
    let cfg: ExperimentConfig = serde_json::from_str(raw)?;
    resolve(&cfg)
}

/// Build just the task, for commands that take no sampler.
pub fn resolve_task(cfg: &TaskConfig) -> Result<TaskInstance, ConfigError> {
    Ok(build_task(cfg, "exact")?.task)
}
