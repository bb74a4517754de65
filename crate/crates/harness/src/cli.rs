//! The `vgb` command line: list-tasks, analyze, sample, experiment,
//! train-value. `cli_main` is the whole binary minus `process::exit`,
//! so integration tests can drive it in-process.

use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::Context;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use samplers::RunRecord;
use value_training::{generate_rollouts, save_oracle, train_value_oracle, Loss, TrainConfig};

use crate::analyze::{analyze_task, write_analyze_to_path, AnalyzeRow};
use crate::config::{
    resolve, resolve_task, validate_config, ExperimentConfig, OracleConfig, SamplerConfig,
    TaskConfig, TASK_NAMES,
};
use crate::rows::{fmt17, write_rows_to_path, CsvRow};
use crate::runner::{run_experiment, run_replicates};

#[derive(Parser)]
#[command(
    name = "vgb",
    version,
    about = "Tree samplers driven by value oracles, with chain diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the registered task names, one per line
    ListTasks,
    /// Check the sampling chain of a task against its structural bounds
    Analyze(AnalyzeArgs),
    /// Draw independent runs and write one CSV row per run
    Sample(SampleArgs),
    /// Run an experiment described by a JSON config
    Experiment(ExperimentArgs),
    /// Fit value networks on base-model rollouts and save them
    TrainValue(TrainValueArgs),
}

/// Task selection shared by the non-config subcommands.
#[derive(Args)]
struct TaskFlags {
    /// Task name (see list-tasks)
    #[arg(long)]
    task: String,

    /// Horizon override
    #[arg(long = "H")]
    horizon: Option<usize>,

    /// Value perturbation for abc, log-weight perturbation for kl_abc
    #[arg(long)]
    eps: Option<f64>,

    /// Tilt temperature for kl_abc
    #[arg(long)]
    beta: Option<f64>,

    /// Parity block length
    #[arg(long = "K")]
    k: Option<usize>,

    /// Parity block count
    #[arg(long = "M")]
    m: Option<usize>,

    /// Depth discount of the dyck heuristic oracle
    #[arg(long)]
    alpha: Option<f64>,
}

impl TaskFlags {
    fn to_config(&self) -> anyhow::Result<TaskConfig> {
        let mut cfg = TaskConfig::named(&self.task);
        cfg.horizon = self.horizon;
        match (self.eps, self.task.as_str()) {
            (None, _) => {}
            (Some(e), "abc") => cfg.eps_v = Some(e),
            (Some(e), "kl_abc") => cfg.eps_q = Some(e),
            (Some(_), other) => anyhow::bail!("--eps does not apply to task {other:?}"),
        }
        cfg.beta = self.beta;
        cfg.k = self.k;
        cfg.m = self.m;
        cfg.alpha = self.alpha;
        Ok(cfg)
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    task: TaskFlags,

    /// Value oracle to analyze
    #[arg(long, default_value = "exact")]
    oracle: String,

    /// Output CSV path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    task: TaskFlags,

    /// Sampler name
    #[arg(long)]
    algo: String,

    /// Value oracle backing the sampler
    #[arg(long, default_value = "exact")]
    oracle: String,

    /// Number of independent runs
    #[arg(long, default_value_t = 100)]
    n: usize,

    /// Master seed; run i uses stream i + 1
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Walk length for vgb, step cap for the hitting-time samplers
    #[arg(long = "T")]
    t: Option<u64>,

    /// Worker threads
    #[arg(long, default_value_t = 1)]
    jobs: usize,

    /// Output CSV path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment config
    #[arg(long)]
    config: PathBuf,

    /// Output CSV path; falls back to the config's "out", then stdout
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct TrainValueArgs {
    #[command(flatten)]
    task: TaskFlags,

    /// Number of rollouts
    #[arg(long, default_value_t = 10_000)]
    n: usize,

    /// Seed for both rollouts and initialization
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Where to save the serialized net stack
    #[arg(long)]
    out: PathBuf,

    /// Fit a net at the final depth instead of reading terminal weights
    #[arg(long)]
    learned_leaves: bool,
}

pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    match run_cmd(cli.cmd) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    }
}

fn run_cmd(cmd: Cmd) -> anyhow::Result<()> {
    match cmd {
        Cmd::ListTasks => {
            for name in TASK_NAMES {
                println!("{name}");
            }
            Ok(())
        }
        Cmd::Analyze(args) => cmd_analyze(args),
        Cmd::Sample(args) => cmd_sample(args),
        Cmd::Experiment(args) => cmd_experiment(args),
        Cmd::TrainValue(args) => cmd_train_value(args),
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> anyhow::Result<()> {
    let task = resolve_task(&args.task.to_config()?)?;
    let rows = analyze_task(&task, &args.oracle)?;
    match &args.out {
        Some(path) => {
            write_analyze_to_path(path, &rows)
                .with_context(|| format!("writing {}", path.display()))?;
            report_analyze(&rows);
        }
        None => crate::analyze::write_analyze_rows(std::io::stdout(), &rows)?,
    }
    Ok(())
}

fn report_analyze(rows: &[AnalyzeRow]) {
    let failed = rows.iter().filter(|r| !r.pass).count();
    if failed == 0 {
        eprintln!("all {} checks passed", rows.len());
    } else {
        eprintln!("{failed} of {} checks FAILED", rows.len());
    }
}

fn cmd_sample(args: SampleArgs) -> anyhow::Result<()> {
    let mut sampler = SamplerConfig::named(&args.algo);
    match args.algo.as_str() {
        "vgb" => sampler.t = args.t,
        "vgb_first_leaf" | "vgb_momentum" | "alrs" | "alrs_large" => sampler.step_cap = args.t,
        _ => {
            if args.t.is_some() {
                anyhow::bail!("--T does not apply to sampler {:?}", args.algo);
            }
        }
    }
    let cfg = ExperimentConfig {
        task: args.task.to_config()?,
        oracle: OracleConfig {
            name: args.oracle.clone(),
            ..OracleConfig::default()
        },
        sampler,
        replicates: args.n.max(1),
        seed: args.seed,
        metrics: vec![],
        seed_groups: 1,
        out: None,
        cov_ratio: None,
    };
    let resolved = resolve(&cfg)?;
    let outcomes = run_replicates(&resolved, args.jobs);

    let rows: Vec<CsvRow> = outcomes
        .iter()
        .enumerate()
        .map(|(i, outcome)| {
            let (value, notes) = match outcome {
                Ok(rec) => (rec.steps as f64, describe_run(&resolved.task, rec)),
                Err(err) => (f64::NAN, format!("failed: {err}")),
            };
            CsvRow {
                task: resolved.task_name.clone(),
                algorithm: resolved.sampler_name.clone(),
                oracle: resolved.oracle_name.clone(),
                seed: resolved.seed.wrapping_add(i as u64 + 1),
                h: resolved.task.horizon(),
                params_json: resolved.params_json.clone(),
                metric: "steps".to_string(),
                value,
                stderr: None,
                n: 1,
                notes,
            }
        })
        .collect();

    match &args.out {
        Some(path) => {
            write_rows_to_path(path, &rows)
                .with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {} runs to {}", rows.len(), path.display());
        }
        None => crate::rows::write_rows(std::io::stdout(), &rows)?,
    }
    Ok(())
}

fn describe_run(task: &tasks::TaskInstance, rec: &RunRecord) -> String {
    let mut out = format!("y={}", task.render(rec.terminal.actions()));
    if !rec.is_leaf {
        out.push_str(" nonleaf");
    }
    if rec.restarts > 0 {
        out.push_str(&format!(" restarts={}", rec.restarts));
    }
    if rec.timed_out {
        out.push_str(" timed_out");
    }
    out
}

fn cmd_experiment(args: ExperimentArgs) -> anyhow::Result<()> {
    let raw = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let resolved = validate_config(&raw)?;
    let rows = run_experiment(&resolved, args.jobs);
    let out = args.out.as_ref().or(resolved.out.as_ref());
    match out {
        Some(path) => {
            write_rows_to_path(path, &rows)
                .with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => crate::rows::write_rows(std::io::stdout(), &rows)?,
    }
    Ok(())
}

fn cmd_train_value(args: TrainValueArgs) -> anyhow::Result<()> {
    let task = resolve_task(&args.task.to_config()?)?;
    let model = task.model().clone();
    let tilt = task.tilt().clone();

    let mut config = match args.task.task.as_str() {
        "parity" => TrainConfig::parity(),
        "dyck" => TrainConfig::dyck(),
        _ => TrainConfig::abc(),
    }
    .with_seed(args.seed);
    config.loss = Loss::for_tilt(&tilt);

    let data = generate_rollouts(model.as_ref(), &tilt, args.n, args.seed);
    let (oracle, reports) =
        train_value_oracle(model, tilt, &data, &config, !args.learned_leaves)?;
    save_oracle(&oracle, &args.out).with_context(|| format!("writing {}", args.out.display()))?;

    for report in &reports {
        let last = report.losses.last().copied().unwrap_or(f64::NAN);
        eprintln!("depth {}: final loss {}", report.depth, fmt17(last));
    }
    eprintln!(
        "saved {} nets ({} rollouts) to {}",
        reports.len(),
        data.len(),
        args.out.display()
    );
    Ok(())
}
