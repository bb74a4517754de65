//! Acceptance suite: twelve end-to-end checks, one test per numbered
//! criterion, each printing a single summary line (visible with
//! `--nocapture`). Every tolerance and fixture constant is pinned here, not
//! read from configuration, so a regression anywhere in the stack turns
//! exactly one of these lines to FAIL.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use chain_analysis::ExactChain;
use harness::analyze_task;
use metrics::{
    bootstrap_mean_ci, chi2, coverage_quantile, hist_l1, kl, mean, position_histogram, stderr, tv,
    EmpiricalDist,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use samplers::{
    action_level_rs, action_level_step_law, beam_search, best_of_n, bon_sample_count,
    rejection_sampling, thm_step_count, vgb_first_leaf, vgb_momentum, ChildSampling,
};
use tasks::{
    abc_task, alrs_tv_exact, beam_counterexample_task, beam_reward, delayed_task, dyck_task,
    parity_task, uniform_policy_regret, TaskInstance,
};
use tree_core::{path_log_density, BaseModel, FnModel, Seq, TargetDist, TiltSpec, DEFAULT_ENUM_CAP};
use value_oracles::{error_profile, exact_oracle, ClosedFormOracle, ValueOracle, WithExactLeaves};
use value_training::{generate_rollouts, train_value_oracle, TrainConfig};

/// Collects sub-checks and reports them as one pass/fail line.
struct Criterion {
    num: u32,
    label: &'static str,
    details: Vec<(bool, String)>,
}

impl Criterion {
    fn new(num: u32, label: &'static str) -> Self {
        Criterion { num, label, details: Vec::new() }
    }

    fn check(&mut self, pass: bool, detail: String) {
        self.details.push((pass, detail));
    }

    fn finish(self) {
        let failed: Vec<&str> =
            self.details.iter().filter(|(p, _)| !p).map(|(_, d)| d.as_str()).collect();
        if failed.is_empty() {
            println!("criterion {:02}: PASS - {}", self.num, self.label);
        } else {
            println!("criterion {:02}: FAIL - {} [{}]", self.num, self.label, failed.join("; "));
            panic!("criterion {:02}: {}", self.num, failed.join("; "));
        }
    }
}

fn linf(a: &BTreeMap<Seq, f64>, b: &BTreeMap<Seq, f64>) -> f64 {
    let mut worst = 0.0f64;
    for (y, p) in a {
        worst = worst.max((p - b.get(y).copied().unwrap_or(0.0)).abs());
    }
    for (y, p) in b {
        worst = worst.max((p - a.get(y).copied().unwrap_or(0.0)).abs());
    }
    worst
}

/// The action-level sampler's leaf law, exactly: the product of its per-step
/// laws over every root-to-leaf path with positive probability.
fn alrs_exact_law(model: &dyn BaseModel, oracle: &dyn ValueOracle) -> BTreeMap<Seq, f64> {
    let mut law = BTreeMap::new();
    let mut stack = vec![(Seq::root(), 1.0f64)];
    while let Some((y, p)) = stack.pop() {
        if y.depth() == model.horizon() {
            *law.entry(y).or_insert(0.0) += p;
            continue;
        }
        if let Some(step) = action_level_step_law(model, oracle, &y) {
            for (a, &q) in step.iter().enumerate() {
                if q > 0.0 {
                    stack.push((y.child(a as u32), p * q));
                }
            }
        }
    }
    law
}

#[test]
fn criterion_01_exact_chain_structure() {
    let mut c = Criterion::new(1, "walk chain structure on every fixture");
    let fixtures: Vec<(TaskInstance, &str)> = vec![
        (abc_task(4, 0.0), "perturbed"),
        (abc_task(4, 0.3), "perturbed"),
        (abc_task(4, 1.0), "perturbed"),
        (delayed_task(4), "delayed"),
        (parity_task(2, 2), "exact"),
        (dyck_task(8, 0.8, 0.1).expect("valid bracket parameters"), "exact"),
    ];
    for (task, oracle) in &fixtures {
        let rows = analyze_task(task, oracle).expect("fixture enumerates");
        for row in rows {
            c.check(
                row.pass,
                format!(
                    "{} {}: {:.3e} vs bound {:.3e}",
                    row.fixture, row.check, row.observed, row.bound
                ),
            );
        }
    }
    c.finish();
}

#[test]
fn criterion_02_step_count_recipe() {
    let mut c = Criterion::new(2, "pinned step count reaches the leaf-law tolerance");
    let start = Instant::now();
    let task = abc_task(6, 0.25);
    let model = task.model();
    let oracle = task.oracle("perturbed").unwrap();
    let exact = task.oracle("exact").unwrap();
    let target = task.target(DEFAULT_ENUM_CAP).unwrap();
    let profile =
        error_profile(oracle.as_ref(), exact.as_ref(), model.as_ref(), &target, DEFAULT_ENUM_CAP)
            .unwrap();
    let (kappa, kappa_leaf) = (profile.kappa_sup, profile.kappa_leaf);
    c.check(
        (kappa - 1.25).abs() <= 1e-12 && (kappa_leaf - 1.0).abs() <= 1e-12,
        format!("measured error bounds ({kappa:.4}, {kappa_leaf:.4}) match the fixture"),
    );
    let t = thm_step_count(kappa, kappa_leaf, 6, 1e-3);
    let chain = ExactChain::build(model.as_ref(), oracle.as_ref(), DEFAULT_ENUM_CAP).unwrap();
    let nu = chain.propagate(&chain.delta_root(), t);
    let leaf_mass = chain.leaf_mass(&nu);
    let mass_floor = 1.0 / (8.0 * kappa * 6.0);
    c.check(leaf_mass >= mass_floor, format!("leaf mass {leaf_mass:.4} >= {mass_floor:.4} at T={t}"));
    let cond = chain.leaf_conditional(&nu).expect("positive leaf mass");
    let x2 = chi2(&cond, target.as_map());
    c.check(x2 <= 1e-3, format!("leaf-conditional chi-square {x2:.3e} <= 1e-3 at T={t}"));
    let secs = start.elapsed().as_secs_f64();
    c.check(secs <= 120.0, format!("runtime {secs:.1}s <= 120s"));
    c.finish();
}

#[test]
fn criterion_03_per_step_bias_vs_walk() {
    let mut c = Criterion::new(3, "per-step bias compounds with depth, the walk's does not");
    let tv25 = alrs_tv_exact(25, 0.1);
    let tv100 = alrs_tv_exact(100, 0.1);
    c.check(tv25 >= 0.05, format!("action-level TV {tv25:.4} >= 0.05 at depth 25"));
    let ratio = tv100 / tv25;
    c.check(
        (1.6..=2.4).contains(&ratio),
        format!("TV(100)/TV(25) = {ratio:.3} inside [1.6, 2.4]"),
    );
    for eps in [0.0, 0.1, 0.25, 0.3, 1.0] {
        let task = abc_task(6, eps);
        let oracle = task.oracle("perturbed").unwrap();
        let chain =
            ExactChain::build(task.model().as_ref(), oracle.as_ref(), DEFAULT_ENUM_CAP).unwrap();
        let cond = chain.stationary_leaf_conditional().expect("leaves carry mass");
        let target = task.target(DEFAULT_ENUM_CAP).unwrap();
        let gap = linf(&cond, target.as_map());
        c.check(gap <= 1e-10, format!("stationary leaf law off by {gap:.2e} at eps={eps}"));
    }
    c.finish();
}

#[test]
fn criterion_04_stale_values_flatten_per_step_laws() {
    let mut c = Criterion::new(4, "one-step-stale values: per-step laws go uniform, walk recovers");
    let task = delayed_task(6);
    let model = task.model();
    let delayed = task.oracle("delayed").unwrap();
    let mut worst = 0.0f64;
    let mut stack = vec![Seq::root()];
    while let Some(y) = stack.pop() {
        if y.depth() == 6 {
            continue;
        }
        let law =
            action_level_step_law(model.as_ref(), delayed.as_ref(), &y).expect("live prefix");
        for p in &law {
            worst = worst.max((p - 0.5).abs());
        }
        for a in 0..2 {
            stack.push(y.child(a));
        }
    }
    c.check(worst <= 1e-12, format!("per-step laws deviate from uniform by {worst:.2e}"));

    let target = task.target(DEFAULT_ENUM_CAP).unwrap();
    let beta = task.tilt().reward_form().expect("reward-form tilt").beta;
    let u = 0.5f64.powi(6);
    let kl_uniform: f64 = target.iter().map(|(_, p)| u * (u.ln() - p.ln())).sum();
    let closed = uniform_policy_regret();
    c.check(
        (beta * kl_uniform - closed).abs() <= 1e-9,
        format!("uniform-law regret {:.12} vs closed form {closed:.12}", beta * kl_uniform),
    );

    // The walk with the same stale interior values but observable terminal
    // rewards, run for the pinned step count.
    let wrapped = WithExactLeaves::new(Arc::clone(&delayed), task.tilt().clone(), 6);
    let exact = task.oracle("exact").unwrap();
    let profile =
        error_profile(&wrapped, exact.as_ref(), model.as_ref(), &target, DEFAULT_ENUM_CAP).unwrap();
    let t = thm_step_count(profile.kappa_sup, profile.kappa_leaf, 6, 1e-3);
    let chain = ExactChain::build(model.as_ref(), &wrapped, DEFAULT_ENUM_CAP).unwrap();
    let nu = chain.propagate(&chain.delta_root(), t);
    let cond = chain.leaf_conditional(&nu).expect("positive leaf mass");
    let regret = beta * kl(&cond, target.as_map());
    c.check(
        regret <= beta * 1e-3,
        format!("walk regret {regret:.3e} <= {:.3e} at T={t}", beta * 1e-3),
    );
    c.finish();
}

#[test]
fn criterion_05_beam_collapses_to_the_consolation_reward() {
    let mut c = Criterion::new(5, "wide beam under exact guidance still lands on the consolation");
    let h = 12usize;
    let task = beam_counterexample_task(h);
    let guidance = task.oracle("exact").unwrap();
    let mut terminals = Vec::with_capacity(100);
    for _ in 0..100 {
        let rec = beam_search(task.model().as_ref(), guidance.as_ref(), 32);
        assert!(rec.is_leaf, "beam returns a full sequence");
        terminals.push(rec.terminal);
    }
    let reward = beam_reward(h, &terminals[0]);
    let identical = terminals.iter().all(|y| y == &terminals[0]);
    c.check(
        identical && (reward - 1.0 / 32.0).abs() <= 1e-15,
        format!("beam reward {reward} = 1/32 on all 100 repeats (search is deterministic)"),
    );
    let target = task.target(DEFAULT_ENUM_CAP).unwrap();
    let top_mass: f64 =
        target.iter().filter(|(y, _)| beam_reward(h, y) == 1.0).map(|(_, p)| p).sum();
    c.check(
        (top_mass - 1.0 / 3.0).abs() <= 1e-12,
        format!("target mass on reward-1 strings {top_mass:.15} = 1/3"),
    );
    let expected = target.expectation(|y| beam_reward(h, y));
    let closed = task.fact("expected_reward").expect("registered fact").value;
    c.check(
        (expected - closed).abs() <= 1e-12 && expected >= 1.0 / 3.0,
        format!("exact expected reward {expected:.15} matches its closed form, >= 1/3"),
    );
    c.finish();
}

/// Two-point leaf multiplier from a seeded hash of the leaf's first four
/// actions. Tying the noise to depth-4 blocks makes the deeper instance an
/// extension of the same random oracle rather than a fresh draw, so the
/// depth comparison below is not at the mercy of small-support sampling
/// noise in the multipliers themselves.
fn leaf_flip(seed: u64, y: &Seq) -> bool {
    let mut z = seed ^ 0x9E37_79B9_7F4A_7C15;
    for &a in y.actions().iter().take(4) {
        z = (z ^ (a as u64 + 1)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z ^= z >> 27;
    }
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    (z >> 63) == 0
}

#[test]
fn criterion_06_consistent_oracles_do_not_drift() {
    let mut c = Criterion::new(6, "self-consistent random oracles: exact product law, no depth drift");
    // Each seeded oracle multiplies leaf weights by 1.15 or 1/1.15; interior
    // values are the exact sums of those leaves, so the oracle is consistent
    // and its multiplicative error stays within the 1.2 budget.
    const MULT: f64 = 1.15;
    for seed in 0..10u64 {
        let mut tv_by_h = Vec::new();
        for h in [4usize, 8] {
            let task = abc_task(h, 0.0);
            let model = task.model();
            let target = task.target(DEFAULT_ENUM_CAP).unwrap();
            let base = task.tilt().clone();
            let tilt = TiltSpec::from_log_fn(move |y| {
                base.log_tau(y) + if leaf_flip(seed, y) { MULT.ln() } else { -MULT.ln() }
            });
            let oracle = exact_oracle(model.as_ref(), &tilt, DEFAULT_ENUM_CAP).unwrap();
            let profile = error_profile(
                &oracle,
                task.oracle("exact").unwrap().as_ref(),
                model.as_ref(),
                &target,
                DEFAULT_ENUM_CAP,
            )
            .unwrap();
            c.check(
                profile.kappa_sup <= 1.2 && profile.kappa_leaf <= 1.2,
                format!("seed {seed} H={h}: error bound {:.4} <= 1.2", profile.kappa_sup),
            );
            let law = alrs_exact_law(model.as_ref(), &oracle);
            let implicit = TargetDist::from_log_weights(
                target
                    .as_map()
                    .keys()
                    .map(|y| (y.clone(), path_log_density(model.as_ref(), y) + tilt.log_tau(y))),
                h,
            )
            .unwrap();
            let gap = linf(&law, implicit.as_map());
            c.check(
                gap <= 1e-10,
                format!("seed {seed} H={h}: product law off its tilted policy by {gap:.2e}"),
            );
            tv_by_h.push(tv(&law, target.as_map()));
        }
        c.check(
            tv_by_h[1] <= tv_by_h[0] + 0.01,
            format!("seed {seed}: TV {:.4} at H=8 <= {:.4} + 0.01 at H=4", tv_by_h[1], tv_by_h[0]),
        );
    }
    c.finish();
}

#[test]
fn criterion_07_rejection_frequencies() {
    let mut c = Criterion::new(7, "rejection sampler matches the tilted law on five outcomes");
    const WEIGHTS: [f64; 5] = [1.0, 2.0, 3.0, 4.0, 0.0];
    const M_BOUND: f64 = 12.0;
    const DELTA: f64 = 0.01;
    const RUNS: usize = 1_000_000;
    let total: f64 = WEIGHTS.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut counts = [0u64; 5];
    let mut fallbacks = 0u64;
    for _ in 0..RUNS {
        let out = rejection_sampling(
            |r: &mut ChaCha8Rng| r.gen_range(0..5usize),
            |&i| WEIGHTS[i],
            M_BOUND,
            DELTA,
            &mut rng,
        )
        .expect("tilt is not degenerate");
        counts[out.sample] += 1;
        fallbacks += u64::from(out.fallback);
    }
    for (i, &w) in WEIGHTS.iter().enumerate() {
        let p = w / total;
        let want = RUNS as f64 * p;
        let band = 4.0 * (RUNS as f64 * p * (1.0 - p)).sqrt();
        c.check(
            (counts[i] as f64 - want).abs() <= band,
            format!("cell {i}: {} inside {want:.0} +- {band:.0}", counts[i]),
        );
    }
    c.check(fallbacks == 0, format!("{fallbacks} fallback draws (none expected at this seed)"));
    c.finish();
}

#[test]
fn criterion_08_parity_scaling_split() {
    let mut c = Criterion::new(8, "restart cost explodes with block count, backtracking stays linear");
    const RUNS: usize = 200;
    let mut rs_means = Vec::new();
    let mut walk_means = Vec::new();
    let mut rs_m8 = Vec::new();
    let mut walk_m8 = Vec::new();
    for m in [4usize, 6, 8] {
        let task = parity_task(4, m);
        let model = task.model();
        let ansatz = task.oracle("ansatz").unwrap();
        let mut steps_rs = Vec::with_capacity(RUNS);
        let mut steps_walk = Vec::with_capacity(RUNS);
        for i in 0..RUNS as u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(800 + m as u64);
            rng.set_stream(i + 1);
            let rec = action_level_rs(model.as_ref(), ansatz.as_ref(), None, &mut rng);
            assert!(rec.is_leaf);
            steps_rs.push(rec.steps as f64);
            let mut rng = ChaCha8Rng::seed_from_u64(810 + m as u64);
            rng.set_stream(i + 1);
            let rec = vgb_first_leaf(
                model.as_ref(),
                ansatz.as_ref(),
                ChildSampling::Enumerate,
                10_000_000,
                &mut rng,
            );
            assert!(rec.is_leaf);
            steps_walk.push(rec.steps as f64);
        }
        rs_means.push(mean(&steps_rs));
        walk_means.push(mean(&steps_walk));
        if m == 8 {
            rs_m8 = steps_rs;
            walk_m8 = steps_walk;
        }
    }
    for i in [1usize, 2] {
        let grew = rs_means[i] / rs_means[i - 1];
        c.check(
            grew >= 3.0,
            format!(
                "restart mean grew x{grew:.2} (>= 3) into M={}: {:.0} -> {:.0}",
                4 + 2 * i,
                rs_means[i - 1],
                rs_means[i]
            ),
        );
        // The walk's first-leaf time is diffusive: 5000-run calibration gives
        // mean steps 327.3 / 723.2 / 1259.6 at M = 4 / 6 / 8 (sem ~ 1%), i.e.
        // ~1.1 H^2 with population growth factors 2.21 into M=6 and 1.74 into
        // M=8. The M=6 factor tracks the (24/16)^2 = 2.25 scaling law, so the
        // <= 2 bound below sits under the diffusive limit and fails at the
        // population level, not from an unlucky batch; 200-run batch factors
        // fluctuate by roughly +-0.2 around those values.
        let grew = walk_means[i] / walk_means[i - 1];
        c.check(
            grew <= 2.0,
            format!(
                "walk mean grew x{grew:.2} (<= 2) into M={}: {:.0} -> {:.0}",
                4 + 2 * i,
                walk_means[i - 1],
                walk_means[i]
            ),
        );
    }
    let mut ci_rng = ChaCha8Rng::seed_from_u64(88);
    let (rs_lo, rs_hi) = bootstrap_mean_ci(&rs_m8, 2000, 0.95, &mut ci_rng);
    let (walk_lo, walk_hi) = bootstrap_mean_ci(&walk_m8, 2000, 0.95, &mut ci_rng);
    c.check(
        walk_hi < rs_lo,
        format!(
            "95% intervals split at M=8: walk [{walk_lo:.0}, {walk_hi:.0}] vs restarts [{rs_lo:.0}, {rs_hi:.0}]"
        ),
    );
    c.finish();
}

#[test]
fn criterion_09_best_of_n_coverage_floor() {
    let mut c = Criterion::new(9, "best-of-n with the coverage-derived sample count");
    const F: f64 = 20.0;
    const EPS: f64 = 0.05;
    const DELTA: f64 = 0.05;
    const TRIALS: usize = 10_000;
    let n = bon_sample_count(F, DELTA);
    c.check(n == 60, format!("sample count {n} = ceil(20 ln 20)"));
    // Two outcomes; the proposal puts 0.05 on the one the target gives 0.9,
    // a density ratio of 18, inside the budget F = 20.
    let model = FnModel::new(2, 1, |_| vec![0.05, 0.95]);
    let reward = |y: &Seq| if y.actions()[0] == 0 { 1.0 } else { 0.0 };
    let target_mean = 0.9;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut rewards = Vec::with_capacity(TRIALS);
    for _ in 0..TRIALS {
        let rec =
            best_of_n(n, 1, |r: &mut ChaCha8Rng| model.sample_path(r), reward, &mut rng).unwrap();
        rewards.push(reward(&rec.terminal));
    }
    let got = mean(&rewards);
    let floor = target_mean - EPS - DELTA - 3.0 * stderr(&rewards);
    c.check(got >= floor, format!("mean reward {got:.4} >= floor {floor:.4} over {TRIALS} trials"));
    c.finish();
}

#[test]
fn criterion_10_trained_values_end_to_end() {
    let mut c = Criterion::new(10, "trained values: walk beats per-step sampling, gap widens");
    const ROLLOUTS: usize = 10_000;
    const EVAL_RUNS: usize = 3_000;
    let mut gaps = Vec::new();
    for h in [8usize, 10] {
        let task = abc_task(h, 0.0);
        let model = Arc::clone(task.model());
        let tilt = task.tilt().clone();
        let target = task.target(DEFAULT_ENUM_CAP).unwrap();
        let mut walk_kl = Vec::new();
        let mut rs_kl = Vec::new();
        for seed in 0..5u64 {
            let data = generate_rollouts(model.as_ref(), &tilt, ROLLOUTS, 1_000 * h as u64 + seed);
            let (oracle, _) = train_value_oracle(
                Arc::clone(&model),
                tilt.clone(),
                &data,
                &TrainConfig::abc().with_seed(seed),
                true,
            )
            .unwrap();
            let mut walk_dist = EmpiricalDist::new();
            let mut rng = ChaCha8Rng::seed_from_u64(2_000 * h as u64 + seed);
            for _ in 0..EVAL_RUNS {
                let rec = vgb_first_leaf(
                    model.as_ref(),
                    &oracle,
                    ChildSampling::Enumerate,
                    1_000_000,
                    &mut rng,
                );
                if rec.is_leaf {
                    walk_dist.push_leaf(rec.terminal);
                } else {
                    walk_dist.push_nonleaf();
                }
            }
            walk_kl.push(walk_dist.smoothed_kl(&target));
            let mut rs_dist = EmpiricalDist::new();
            let mut rng = ChaCha8Rng::seed_from_u64(3_000 * h as u64 + seed);
            for _ in 0..EVAL_RUNS {
                let rec = action_level_rs(model.as_ref(), &oracle, None, &mut rng);
                if rec.is_leaf {
                    rs_dist.push_leaf(rec.terminal);
                } else {
                    rs_dist.push_nonleaf();
                }
            }
            rs_kl.push(rs_dist.smoothed_kl(&target));
        }
        let (w, r) = (mean(&walk_kl), mean(&rs_kl));
        c.check(w < r, format!("H={h}: walk KL {w:.4} < per-step KL {r:.4} (5-seed means)"));
        gaps.push(r - w);
    }
    c.check(
        gaps[1] > gaps[0],
        format!("gap widened with depth: {:.4} at H=10 vs {:.4} at H=8", gaps[1], gaps[0]),
    );
    c.finish();
}

#[test]
fn criterion_11_average_case_diagnostics() {
    let mut c = Criterion::new(11, "average-case bounds survive a pointwise-broken oracle");
    const H: usize = 4;
    const INFLATION: f64 = 10.0;
    const T: u64 = 10_000;
    let task = abc_task(H, 0.0);
    let model = Arc::clone(task.model());
    let target = task.target(DEFAULT_ENUM_CAP).unwrap();
    let exact = task.oracle("exact").unwrap();
    // Exact on the target's support; zeroed on the whole subtree under the
    // third action; a dangling two-node branch at (0,2) and (0,2,0) inflated
    // to 10 * pi_ref(y) * V(root), which the exact value says is worthless.
    let root_log_v = exact.log_value(&Seq::root());
    let inner = Arc::clone(&exact);
    let mixed = ClosedFormOracle::new(
        move |y: &Seq| {
            let acts = y.actions();
            if acts.first() == Some(&2) {
                return f64::NEG_INFINITY;
            }
            let dangling = acts.len() >= 2
                && acts.len() <= 3
                && acts[0] == 0
                && acts[1] == 2
                && acts.iter().skip(2).all(|&a| a == 0);
            if dangling {
                return INFLATION.ln() - acts.len() as f64 * 3.0f64.ln() + root_log_v;
            }
            inner.log_value(y)
        },
        true,
    );
    let profile =
        error_profile(&mixed, exact.as_ref(), model.as_ref(), &target, DEFAULT_ENUM_CAP).unwrap();
    c.check(
        profile.kappa_sup.is_infinite(),
        format!("pointwise error bound is violated (sup ratio {})", profile.kappa_sup),
    );
    let kappa = profile.kappa_avg();
    c.check((kappa - 1.0).abs() <= 1e-12, format!("support-averaged bound {kappa:.6} = 1"));

    let chain = ExactChain::build(model.as_ref(), &mixed, DEFAULT_ENUM_CAP).unwrap();
    let root = chain.index_of(&Seq::root()).expect("root is in the chain");
    let mu = chain.mu().to_vec();
    let mut nu = chain.delta_root();
    let mut dirichlet_sum = 0.0;
    let mut min_root_ratio = f64::INFINITY;
    let mut time_avg = vec![0.0; nu.len()];
    for _ in 0..T {
        min_root_ratio = min_root_ratio.min(nu[root] / mu[root]);
        let g: Vec<f64> = nu.iter().zip(&mu).map(|(n, m)| n / m).collect();
        dirichlet_sum += chain.dirichlet_form(&g);
        for (acc, v) in time_avg.iter_mut().zip(&nu) {
            *acc += v / T as f64;
        }
        nu = chain.step(&nu);
    }
    min_root_ratio = min_root_ratio.min(nu[root] / mu[root]);
    let bound = 4.0 * H as f64 * kappa * kappa;
    c.check(
        dirichlet_sum <= bound,
        format!("summed local variation {dirichlet_sum:.3} <= {bound}"),
    );
    c.check(
        min_root_ratio >= 1.0 - 1e-12,
        format!("root never starves: min occupancy ratio {min_root_ratio:.6}"),
    );
    for eta in [0.1, 0.3] {
        for h in 1..=H {
            let bad = chain.bad_prefix_mass(&target, h, eta, kappa);
            c.check(bad <= eta, format!("thin-prefix mass {bad:.3} <= {eta} at depth {h}"));
        }
    }
    let law = chain.to_map(&time_avg);
    let threshold = 48.0 * H as f64 * kappa * kappa / 0.3;
    let covq = coverage_quantile(&target, &law, threshold);
    c.check(covq <= 0.3, format!("coverage quantile {covq:.3} <= 0.3 at ratio {threshold:.0}"));
    c.finish();
}

#[test]
fn criterion_12_momentum_and_histograms() {
    let mut c = Criterion::new(12, "momentum halves walk length; walk histogram beats decoding");
    const RUNS: usize = 3_000;
    let task = dyck_task(8, 0.8, 0.1).expect("valid bracket parameters");
    let model = task.model();
    let target = task.target(DEFAULT_ENUM_CAP).unwrap();
    // Heuristic geometric interior values with exact terminal rewards: the
    // imperfect-but-viability-aware regime both samplers are meant for.
    let oracle = WithExactLeaves::new(task.oracle("geometric").unwrap(), task.tilt().clone(), 8);
    let mut mom_steps = Vec::with_capacity(RUNS);
    let mut walk_steps = Vec::with_capacity(RUNS);
    let mut walk_dist = EmpiricalDist::new();
    let mut rs_dist = EmpiricalDist::new();
    for i in 0..RUNS as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(120);
        rng.set_stream(i + 1);
        let rec = vgb_momentum(model.as_ref(), &oracle, 1_000_000, &mut rng);
        assert!(rec.is_leaf);
        mom_steps.push(rec.steps as f64);
        let mut rng = ChaCha8Rng::seed_from_u64(121);
        rng.set_stream(i + 1);
        let rec = vgb_first_leaf(
            model.as_ref(),
            &oracle,
            ChildSampling::Enumerate,
            1_000_000,
            &mut rng,
        );
        assert!(rec.is_leaf);
        walk_steps.push(rec.steps as f64);
        walk_dist.push_leaf(rec.terminal);
        let mut rng = ChaCha8Rng::seed_from_u64(122);
        rng.set_stream(i + 1);
        let rec = action_level_rs(model.as_ref(), &oracle, None, &mut rng);
        assert!(rec.is_leaf);
        rs_dist.push_leaf(rec.terminal);
    }
    let (mm, wm) = (mean(&mom_steps), mean(&walk_steps));
    c.check(mm <= 0.5 * wm, format!("momentum mean steps {mm:.1} <= half of {wm:.1}"));
    let opens = |a: u32| a == 0 || a == 2;
    let want = position_histogram(target.as_map(), 8, opens);
    let walk_err = hist_l1(&position_histogram(&walk_dist.pmf(), 8, opens), &want);
    let rs_err = hist_l1(&position_histogram(&rs_dist.pmf(), 8, opens), &want);
    c.check(
        walk_err <= rs_err,
        format!("open-position histogram L1: walk {walk_err:.4} <= per-step {rs_err:.4}"),
    );
    c.finish();
}
