use metrics::{
    chi2, coverage_quantile, hist_l1, mean, percentile, position_histogram, stderr, tv,
    EmpiricalDist,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use samplers::{
    action_level_rs, action_level_rs_large, beam_search, best_of_n, block_bon, block_rs,
    outcome_level_rs, vgb_first_leaf, vgb_momentum, vgb_run, RunRecord,
};
use tree_core::{TargetDist, DEFAULT_ENUM_CAP};

use crate::config::{MetricName, Resolved, SamplerSpec};
use crate::rows::{sort_rows, CsvRow};

/// One sampler invocation on the replicate's private stream.
pub fn run_one(r: &Resolved, replicate: u64) -> Result<RunRecord, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
    rng.set_stream(replicate + 1);
    let model = r.task.model().as_ref();
    let oracle = r.oracle.as_ref();
    match &r.sampler {
        SamplerSpec::Vgb { t, output } => Ok(vgb_run(model, oracle, *t, *output, &mut rng)),
        SamplerSpec::VgbFirstLeaf { mode, step_cap } => {
            Ok(vgb_first_leaf(model, oracle, *mode, *step_cap, &mut rng))
        }
        SamplerSpec::VgbMomentum { step_cap } => {
            Ok(vgb_momentum(model, oracle, *step_cap, &mut rng))
        }
        SamplerSpec::Alrs { max_steps } => Ok(action_level_rs(model, oracle, *max_steps, &mut rng)),
        SamplerSpec::AlrsLarge {
            m,
            delta,
            max_steps,
        } => action_level_rs_large(model, oracle, *m, *delta, *max_steps, &mut rng)
            .map_err(|e| e.to_string()),
        SamplerSpec::OutcomeRs {
            tau_max,
            max_attempts,
        } => outcome_level_rs(model, r.task.tilt(), *tau_max, *max_attempts, &mut rng)
            .map_err(|e| e.to_string()),
        SamplerSpec::BlockBon { block_len, n } => {
            Ok(block_bon(model, oracle, *block_len, *n, &mut rng))
        }
        SamplerSpec::BlockRs { block_len, n } => {
            Ok(block_rs(model, oracle, *block_len, *n, &mut rng))
        }
        SamplerSpec::Bon { n } => best_of_n(
            *n,
            model.horizon(),
            |g| model.sample_path(g),
            |y| oracle.log_value(y),
            &mut rng,
        )
        .map_err(|e| e.to_string()),
        SamplerSpec::Beam { width } => Ok(beam_search(model, oracle, *width)),
    }
}

/// All replicates, each on its own stream; order and content do not depend
/// on the worker count.
pub fn run_replicates(r: &Resolved, jobs: usize) -> Vec<Result<RunRecord, String>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| {
        (0..r.replicates as u64)
            .into_par_iter()
            .map(|i| run_one(r, i))
            .collect()
    })
}

fn group_dist(records: &[&RunRecord]) -> EmpiricalDist {
    let mut dist = EmpiricalDist::new();
    for rec in records {
        if rec.is_leaf {
            dist.push_leaf(rec.terminal.clone());
        } else {
            dist.push_nonleaf();
        }
    }
    dist
}

fn distributional_value(
    metric: MetricName,
    dist: &EmpiricalDist,
    target: Option<&TargetDist>,
    r: &Resolved,
) -> Result<f64, String> {
    let need_target = || target.ok_or_else(|| "target law is not enumerable".to_string());
    match metric {
        MetricName::NonleafFraction => Ok(dist.nonleaf_fraction()),
        MetricName::DistinctCorrect => {
            let tilt = r.task.tilt();
            Ok(dist
                .counts()
                .keys()
                .filter(|y| tilt.tau(y) > 0.0)
                .count() as f64)
        }
        MetricName::Tv => Ok(tv(&dist.pmf(), &need_target()?.as_map())),
        MetricName::Kl => Ok(dist.smoothed_kl(need_target()?)),
        MetricName::Chi2 => Ok(chi2(&dist.pmf(), &need_target()?.as_map())),
        MetricName::CovQ => {
            let ratio = r
                .cov_ratio
                .ok_or_else(|| "cov_ratio is not set in the config".to_string())?;
            Ok(coverage_quantile(need_target()?, &dist.pmf(), ratio))
        }
        MetricName::KlRegret => {
            let beta = r
                .task
                .tilt()
                .reward_form()
                .map(|rf| rf.beta)
                .ok_or_else(|| "task has no regularization scale".to_string())?;
            Ok(beta * dist.smoothed_kl(need_target()?))
        }
        MetricName::HistL1 => {
            let target = need_target()?;
            let h = r.task.horizon();
            // Position profile of the marked symbol; for bracket tasks the
            // opens are actions 0 and 2.
            let dyck = r.task_name == "dyck";
            let pred = |a: u32| if dyck { a == 0 || a == 2 } else { a == 0 };
            let got = position_histogram(&dist.pmf(), h, pred);
            let want = position_histogram(&target.as_map(), h, pred);
            Ok(hist_l1(&got, &want))
        }
        _ => unreachable!("per-run metric routed to distributional_value"),
    }
}

/// Aggregate replicate outcomes into one row per configured metric.
pub fn experiment_rows(r: &Resolved, outcomes: &[Result<RunRecord, String>]) -> Vec<CsvRow> {
    let records: Vec<&RunRecord> = outcomes.iter().filter_map(|o| o.as_ref().ok()).collect();
    let first_error = outcomes.iter().find_map(|o| o.as_ref().err().cloned());
    let error_count = outcomes.len() - records.len();
    let base_note = if error_count > 0 {
        format!(
            "{error_count}/{} replicates failed: {}",
            outcomes.len(),
            first_error.as_deref().unwrap_or("unknown")
        )
    } else {
        String::new()
    };

    let target = r.task.target(DEFAULT_ENUM_CAP).ok();

    // Contiguous equal chunks; replicate i belongs to group i / per_group.
    let per_group = r.replicates / r.seed_groups;
    let group_dists: Vec<EmpiricalDist> = (0..r.seed_groups)
        .map(|g| {
            let members: Vec<&RunRecord> = outcomes[g * per_group..(g + 1) * per_group]
                .iter()
                .filter_map(|o| o.as_ref().ok())
                .collect();
            group_dist(&members)
        })
        .collect();

    let mut rows = Vec::with_capacity(r.metrics.len());
    for &metric in &r.metrics {
        let mut row = CsvRow {
            task: r.task_name.clone(),
            algorithm: r.sampler_name.clone(),
            oracle: r.oracle_name.clone(),
            seed: r.seed,
            h: r.task.horizon(),
            params_json: r.params_json.clone(),
            metric: metric.as_str().to_string(),
            value: f64::NAN,
            stderr: None,
            n: records.len() as u64,
            notes: base_note.clone(),
        };
        if records.is_empty() {
            rows.push(row);
            continue;
        }
        if metric.is_distributional() {
            let mut values = Vec::with_capacity(group_dists.len());
            let mut failure = None;
            for dist in &group_dists {
                match distributional_value(metric, dist, target.as_ref(), r) {
                    Ok(v) => values.push(v),
                    Err(e) => {
                        failure = Some(e);
                        break;
                    }
                }
            }
            match failure {
                Some(e) => {
                    row.notes = if row.notes.is_empty() {
                        e
                    } else {
                        format!("{}; {e}", row.notes)
                    };
                }
                None => {
                    row.value = mean(&values);
                    if values.len() > 1 {
                        row.stderr = Some(stderr(&values));
                    }
                }
            }
        } else {
            match metric {
                MetricName::StepsMean => {
                    let xs: Vec<f64> = records.iter().map(|r| r.steps as f64).collect();
                    row.value = mean(&xs);
                    if xs.len() > 1 {
                        row.stderr = Some(stderr(&xs));
                    }
                }
                MetricName::StepsP50 => {
                    let xs: Vec<f64> = records.iter().map(|r| r.steps as f64).collect();
                    row.value = percentile(&xs, 50.0);
                }
                MetricName::RestartsMean => {
                    let xs: Vec<f64> = records.iter().map(|r| r.restarts as f64).collect();
                    row.value = mean(&xs);
                    if xs.len() > 1 {
                        row.stderr = Some(stderr(&xs));
                    }
                }
                MetricName::Accuracy => {
                    let tilt = r.task.tilt();
                    let xs: Vec<f64> = records
                        .iter()
                        .map(|rec| {
                            if rec.is_leaf && tilt.tau(&rec.terminal) > 0.0 {
                                1.0
                            } else {
                                0.0
                            }
                        })
                        .collect();
                    row.value = mean(&xs);
                    if xs.len() > 1 {
                        row.stderr = Some(stderr(&xs));
                    }
                }
                _ => unreachable!("distributional metric routed to per-run arm"),
            }
        }
        rows.push(row);
    }
    sort_rows(&mut rows);
    rows
}

/// Run every replicate and aggregate, the whole experiment in one call.
pub fn run_experiment(r: &Resolved, jobs: usize) -> Vec<CsvRow> {
    let outcomes = run_replicates(r, jobs);
    experiment_rows(r, &outcomes)
}
