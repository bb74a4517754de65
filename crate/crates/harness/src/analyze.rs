use std::io::Write;
use std::path::Path;

use anyhow::Context;
use chain_analysis::ExactChain;
use tasks::TaskInstance;
use tree_core::{path_log_density, Seq, TargetDist, DEFAULT_ENUM_CAP};
use value_oracles::{error_profile, ValueOracle};

use crate::rows::fmt17;

/// One structural check of the walk's chain against its proved bound.
#[derive(Debug, Clone)]
pub struct AnalyzeRow {
    pub fixture: String,
    pub check: String,
    /// The proved threshold; an upper bound for residual checks, a lower
    /// bound for mass and conductance checks.
    pub bound: f64,
    pub observed: f64,
    /// Slack in the favorable direction; negative means failed.
    pub margin: f64,
    pub pass: bool,
}

fn upper(fixture: &str, check: &str, bound: f64, observed: f64) -> AnalyzeRow {
    AnalyzeRow {
        fixture: fixture.to_string(),
        check: check.to_string(),
        bound,
        observed,
        margin: bound - observed,
        pass: observed <= bound,
    }
}

fn lower(fixture: &str, check: &str, bound: f64, observed: f64) -> AnalyzeRow {
    AnalyzeRow {
        fixture: fixture.to_string(),
        check: check.to_string(),
        bound,
        observed,
        margin: observed - bound,
        // The mass bounds are attained exactly on exact-oracle chains, so
        // leave rounding room below the bound itself.
        pass: observed >= bound * (1.0 - 1e-12),
    }
}

/// The value-weighted leaf law the chain should reproduce, computed by
/// direct enumeration rather than through the chain.
fn value_weighted_leaf_law(
    task: &TaskInstance,
    oracle: &dyn ValueOracle,
) -> anyhow::Result<TargetDist> {
    let model = task.model().as_ref();
    let horizon = task.horizon();
    let mut weights = Vec::new();
    let mut stack = vec![Seq::root()];
    while let Some(y) = stack.pop() {
        if y.depth() == horizon {
            let lw = path_log_density(model, &y) + oracle.log_value(&y);
            if lw > f64::NEG_INFINITY {
                weights.push((y, lw));
            }
            continue;
        }
        anyhow::ensure!(
            weights.len() <= DEFAULT_ENUM_CAP,
            "leaf enumeration exceeded {DEFAULT_ENUM_CAP}"
        );
        for (a, &p) in model.conditionals(&y).iter().enumerate() {
            if p > 0.0 {
                stack.push(y.child(a as u32));
            }
        }
    }
    TargetDist::from_log_weights(weights, horizon).context("all leaves carry zero value")
}

/// Structural diagnostics for one task/oracle pair: reversibility,
/// stationarity, mass lower bounds, conductance, and the leaf law identity.
pub fn analyze_task(task: &TaskInstance, oracle_name: &str) -> anyhow::Result<Vec<AnalyzeRow>> {
    let oracle = task
        .oracle(oracle_name)
        .with_context(|| format!("task has no oracle {oracle_name:?}"))?;
    let chain = ExactChain::build(task.model().as_ref(), oracle.as_ref(), DEFAULT_ENUM_CAP)?;
    let fixture = format!("{}/oracle={}", task.name(), oracle_name);
    let horizon = task.horizon() as f64;

    // Multiplicative oracle error, for the mass and conductance bounds. An
    // infinite kappa degrades them to the trivial bound 0, which is still
    // checked rather than skipped.
    let (kappa, kappa_leaf) = if oracle_name == "exact" {
        (1.0, 1.0)
    } else {
        let exact = task
            .oracle("exact")
            .context("bounds need the exact oracle as reference")?;
        let target = task.target(DEFAULT_ENUM_CAP)?;
        let profile = error_profile(
            oracle.as_ref(),
            exact.as_ref(),
            task.model().as_ref(),
            &target,
            DEFAULT_ENUM_CAP,
        )?;
        (profile.kappa_sup, profile.kappa_leaf)
    };

    let mut rows = vec![
        upper(
            &fixture,
            "detailed_balance",
            1e-12,
            chain.detailed_balance_violation(),
        ),
        upper(&fixture, "stationarity_l1", 1e-10, chain.stationary_l1()),
        lower(
            &fixture,
            "root_mass",
            1.0 / (2.0 * kappa * kappa * horizon),
            chain.mu()[0],
        ),
        lower(
            &fixture,
            "leaf_mass",
            1.0 / (2.0 * kappa * kappa_leaf * horizon),
            chain.leaf_mass(chain.mu()),
        ),
        lower(
            &fixture,
            "subtree_conductance",
            1.0 / (4.0 * kappa * kappa * horizon),
            chain.subtree_conductance(),
        ),
    ];

    let tilde = value_weighted_leaf_law(task, oracle.as_ref())?;
    let stationary = chain
        .stationary_leaf_conditional()
        .context("stationary law has no leaf mass")?;
    let mut linf: f64 = 0.0;
    for (y, p) in tilde.iter() {
        linf = linf.max((p - stationary.get(y).copied().unwrap_or(0.0)).abs());
    }
    for (y, p) in &stationary {
        linf = linf.max((p - tilde.prob(y)).abs());
    }
    rows.push(upper(&fixture, "leaf_conditional_linf", 1e-10, linf));

    Ok(rows)
}

pub const ANALYZE_HEADER: [&str; 6] = ["fixture", "check", "bound", "observed", "margin", "pass"];

pub fn write_analyze_rows<W: Write>(out: W, rows: &[AnalyzeRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ANALYZE_HEADER)?;
    for r in rows {
        w.write_record([
            r.fixture.as_str(),
            r.check.as_str(),
            &fmt17(r.bound),
            &fmt17(r.observed),
            &fmt17(r.margin),
            if r.pass { "true" } else { "false" },
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_analyze_to_path(path: &Path, rows: &[AnalyzeRow]) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    write_analyze_rows(&mut buf, rows)?;
    std::fs::write(path, buf)?;
    Ok(())
}
