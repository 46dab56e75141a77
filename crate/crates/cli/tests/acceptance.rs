//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Criteria 7–9 measure real child processes, so they serialize on a shared
//! lock to keep wall-clock readings clean while the numeric criteria run
//! alongside.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use perflab_cli::commands::{cmd_optimize, cmd_report};
use perflab_cli::config::{OptimizerDescriptor, RunConfig};
use perflab_core::metrics::{
    beyond_scores, bootstrap_ci, pass_at_1, percentile_rank, BootstrapConfig, TaskOutcome,
};
use perflab_core::optimizer::{optimize, Optimizer, OptimizerError};
use perflab_core::reward::{
    correctness_reward, efficiency_reward, final_reward, format_reward, group_advantages,
    RewardConfig,
};
use perflab_core::sandbox::{ExecutionLimits, Sandbox};
use perflab_core::store::{masked_value, read_records};
use perflab_core::task::{
    CodeSubmission, EfficiencyObjective, FailureReason, PerformanceRecord, ReferenceDistributions,
    SubmissionOrigin, Task, TestCase,
};

static TIMING_LOCK: Mutex<()> = Mutex::new(());

fn timing_guard() -> std::sync::MutexGuard<'static, ()> {
    TIMING_LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn pass(criterion: u32, name: &str) {
    println!("ACCEPTANCE {criterion:02} {name}: PASS");
}

// ---------------------------------------------------------------------------
// 1. Reward truth tables
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_reward_truth_tables() {
    // the full four-pair transition table
    assert_eq!(correctness_reward(false, true), 1.0);
    assert_eq!(correctness_reward(true, true), 0.5);
    assert_eq!(correctness_reward(false, false), -0.5);
    assert_eq!(correctness_reward(true, false), -1.0);

    // vectors frozen from a reference evaluation of the canonical pattern
    // (fullmatch + DOTALL), including the documented example string and
    // nested-tag rejections
    let vectors: &[(f64, &str)] = &[
        (1.0, "<thinking>reasoning_process</thinking> <solution>improved_solution</solution>"),
        (1.0, "<thinking>t</thinking><solution>s</solution>"),
        (1.0, "  \n<thinking>t</thinking>\n\n<solution>s</solution>\n  "),
        (1.0, "<thinking>line1\nline2</thinking><solution>a\nb\nc</solution>"),
        (1.0, "<thinking>reason</thinking><solution>```python\nprint(1)\n```</solution>"),
        (1.0, "<thinking>a</thinking>b</thinking><solution>c</solution>"),
        (-1.0, "<solution>code</solution>"),
        (-1.0, "<thinking>t</thinking>"),
        (-1.0, "<thinking>a<thinking>b</thinking></thinking><solution>c</solution>"),
        (-1.0, "<thinking>t</thinking><solution>a<thinking>b</thinking></solution>"),
        (-1.0, "<thinking>t</thinking><solution>a<solution>b</solution></solution>"),
        (-1.0, "<thinking>t</thinking>x<solution>s</solution>"),
        (-1.0, "<thinking>t</thinking><solution>s</solution>x"),
        (-1.0, "<solution>s</solution><thinking>t</thinking>"),
        (-1.0, ""),
    ];
    for (expected, text) in vectors {
        assert_eq!(format_reward(text), *expected, "format mismatch on {text:?}");
    }
    pass(1, "reward truth tables");
}

// ---------------------------------------------------------------------------
// 2. Efficiency reward numerics
// ---------------------------------------------------------------------------

/// Independent route: clip and gain spelled out, tanh via the exponential
/// identity rather than the libm call the implementation uses.
fn efficiency_oracle(e_in: f64, e_out: f64, upper: f64, epsilon: f64) -> f64 {
    let clip = |v: f64| {
        if v < 0.0 {
            0.0
        } else if v > upper {
            upper
        } else {
            v
        }
    };
    let gain = (clip(e_in) - clip(e_out)) / (clip(e_in) + epsilon);
    let sign = if gain < 0.0 { -1.0 } else { 1.0 };
    sign * (1.0 - 2.0 / ((2.0 * gain.abs()).exp() + 1.0))
}

#[test]
fn criterion_02_efficiency_reward_numerics() {
    let cfg = RewardConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);

    let uppers = [
        (EfficiencyObjective::Time, 90.0),
        (EfficiencyObjective::Memory, 1_048_576.0),
        (EfficiencyObjective::Integral, 94_371_840.0),
    ];

    for case in 0..1000 {
        let (objective, upper) = uppers[case % 3];
        let draw = |rng: &mut ChaCha8Rng| match rng.gen_range(0..6) {
            0 => 0.0,
            1 => upper,                          // exact clip boundary
            2 => upper * rng.gen_range(1.0..3.0), // above the ceiling
            3 => upper * rng.gen_range(0.0..1.0),
            4 => rng.gen_range(0.0..10.0),
            _ => rng.gen_range(0.0..upper),
        };
        let e_in = draw(&mut rng);
        let e_out = draw(&mut rng);

        let got = efficiency_reward(Some(e_in), e_out, true, objective, &cfg);
        let want = efficiency_oracle(e_in, e_out, upper, cfg.epsilon);
        assert!(
            (got - want).abs() <= 1e-12,
            "mismatch at e_in={e_in} e_out={e_out} upper={upper}: {got} vs {want}"
        );

        // sign law on the same sweep
        let clip = |v: f64| v.clamp(0.0, upper);
        match clip(e_out).partial_cmp(&clip(e_in)).unwrap() {
            std::cmp::Ordering::Less => assert!(got > 0.0),
            std::cmp::Ordering::Greater => assert!(got < 0.0),
            std::cmp::Ordering::Equal => assert_eq!(got, 0.0),
        }
    }

    // monotonicity in the output metric, across the clip ceiling
    for _ in 0..50 {
        let (objective, upper) = uppers[rng.gen_range(0..3)];
        let e_in = rng.gen_range(0.0..upper);
        let mut prev = f64::INFINITY;
        for step in 0..=400 {
            let e_out = upper * 1.5 * step as f64 / 400.0;
            let r = efficiency_reward(Some(e_in), e_out, true, objective, &cfg);
            assert!(r <= prev, "not monotone at e_in={e_in} e_out={e_out}");
            prev = r;
        }
    }

    // spot values pinned by high-precision evaluation
    let r = efficiency_reward(Some(10.0), 5.0, true, EfficiencyObjective::Time, &cfg);
    assert!((r - 0.4621171179376261).abs() < 1e-12);
    let r = efficiency_reward(Some(10.0), 120.0, true, EfficiencyObjective::Time, &cfg);
    assert!((r - -0.9999997749293158).abs() < 1e-12);
    pass(2, "efficiency reward numerics");
}

// ---------------------------------------------------------------------------
// 3. Final reward bounds
// ---------------------------------------------------------------------------

#[test]
fn criterion_03_final_reward_bounds() {
    let cfg = RewardConfig::default();
    assert_eq!((cfg.beta_f, cfg.beta_c, cfg.beta_e), (0.2, 0.5, 0.3));

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100_000 {
        let r_format = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let r_correct = [-1.0, -0.5, 0.5, 1.0][rng.gen_range(0..4)];
        let r_efficiency = rng.gen_range(-1.0..=1.0);
        let b = final_reward(r_format, r_correct, r_efficiency, &cfg);
        assert!(
            (-1.0..=1.0).contains(&b.r_final),
            "out of bounds: {b:?}"
        );
        assert_eq!(
            b.r_final,
            cfg.beta_f * r_format + cfg.beta_c * r_correct + cfg.beta_e * r_efficiency
        );
    }

    // equality at the corners
    assert_eq!(final_reward(1.0, 1.0, 1.0, &cfg).r_final, 1.0);
    assert_eq!(final_reward(-1.0, -1.0, -1.0, &cfg).r_final, -1.0);
    pass(3, "final reward bounds");
}

// ---------------------------------------------------------------------------
// 4. Group advantages
// ---------------------------------------------------------------------------

#[test]
fn criterion_04_group_advantages() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for round in 0..10_000 {
        let size = rng.gen_range(2..=64);
        if round % 50 == 0 {
            // degenerate group: identical rewards standardize to zero
            let constant = rng.gen_range(-1.0..=1.0);
            let adv = group_advantages(&vec![constant; size]).unwrap();
            assert!(adv.iter().all(|a| *a == 0.0));
            continue;
        }
        let rewards: Vec<f64> = (0..size).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let adv = group_advantages(&rewards).unwrap();

        let n = adv.len() as f64;
        let mean = adv.iter().sum::<f64>() / n;
        let std = (adv.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n).sqrt();
        let spread = {
            let m = rewards.iter().sum::<f64>() / n;
            (rewards.iter().map(|r| (r - m) * (r - m)).sum::<f64>() / n).sqrt()
        };
        if spread > 1e-8 {
            assert!(mean.abs() <= 1e-9, "mean {mean} too large");
            assert!((std - 1.0).abs() <= 1e-9, "std {std} too far from 1");
        } else {
            assert!(adv.iter().all(|a| *a == 0.0));
            continue;
        }

        // shift/scale invariance
        let scale = rng.gen_range(0.5..2.0);
        let shift = rng.gen_range(-5.0..5.0);
        let transformed: Vec<f64> = rewards.iter().map(|r| r * scale + shift).collect();
        let adv_t = group_advantages(&transformed).unwrap();
        for (a, b) in adv.iter().zip(&adv_t) {
            assert!((a - b).abs() <= 1e-9, "invariance broken: {a} vs {b}");
        }
    }
    pass(4, "group advantages");
}

// ---------------------------------------------------------------------------
// 5. Percentile rank oracle
// ---------------------------------------------------------------------------

#[test]
fn criterion_05_percentile_rank_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10_000 {
        let len = rng.gen_range(1..=1000);
        let d: Vec<f64> = (0..len).map(|_| rng.gen_range(-1000.0..1000.0)).collect();
        // sometimes force an exact tie
        let x = if rng.gen_bool(0.25) {
            d[rng.gen_range(0..d.len())]
        } else {
            rng.gen_range(-1100.0..1100.0)
        };

        let mut hits = 0usize;
        for value in &d {
            if *value >= x {
                hits += 1;
            }
        }
        let expected = hits as f64 / d.len() as f64;
        assert_eq!(percentile_rank(x, &d).unwrap(), expected);

        // antitonicity
        let x2 = x + rng.gen_range(0.0..100.0);
        assert!(percentile_rank(x, &d).unwrap() >= percentile_rank(x2, &d).unwrap());
    }
    pass(5, "percentile rank oracle");
}

// ---------------------------------------------------------------------------
// 6. Beyond / Pass@1 hand check
// ---------------------------------------------------------------------------

fn bare_task(task_id: &str, dists: ReferenceDistributions) -> Task {
    Task {
        task_id: task_id.into(),
        title: String::new(),
        problem_description: String::new(),
        code_prompt: String::new(),
        runner_template: String::new(),
        evaluator: None,
        test_cases: vec![TestCase {
            input: "x\n".into(),
            expected_output: "y".into(),
        }],
        reference_solutions: vec![],
        reference_distributions: Some(dists),
    }
}

#[test]
fn criterion_06_beyond_hand_check() {
    let dists = ReferenceDistributions {
        time_s: vec![1.0, 3.0],
        memory_kb: vec![100.0, 200.0],
        integral_kb_s: vec![100.0, 500.0],
    };
    let tasks = vec![bare_task("failed", dists.clone()), bare_task("passed", dists)];
    let outcomes = vec![
        TaskOutcome::new(
            "failed",
            vec![PerformanceRecord::failed(FailureReason::WrongAnswer, 0.1, 50.0, 4.0)],
        )
        .unwrap(),
        // time 2.0 against {1.0, 3.0}: percentile rank exactly 0.5
        TaskOutcome::new("passed", vec![PerformanceRecord::passing(2.0, 50.0, 4.0)]).unwrap(),
    ];
    let scores = beyond_scores(&outcomes, &tasks).unwrap();
    assert_eq!(scores.beyond_t, 0.25);
    assert_eq!(pass_at_1(&outcomes).unwrap(), 0.5);
    pass(6, "beyond and pass@1 hand check");
}

// ---------------------------------------------------------------------------
// 7. Sandbox measurement
// ---------------------------------------------------------------------------

// Footprint of the allocator fixture recorded ahead of the build on this
// machine class (100 MB touched buffer + interpreter baseline, held ~1 s).
const ALLOC_ORACLE_PEAK_KB: f64 = 116_900.0;
const ALLOC_ORACLE_TIME_S: f64 = 1.16;

const ALLOC_FIXTURE: &str = r#"
import sys, time
n = int(sys.stdin.readline())
buf = bytearray(100 * 1024 * 1024)
for i in range(0, len(buf), 4096):
    buf[i] = 1
time.sleep(1.0)
print(n + len(buf) // (1024 * 1024))
"#;

fn exec_task(cases: Vec<(&str, &str)>) -> Task {
    Task {
        task_id: "acceptance-exec".into(),
        title: String::new(),
        problem_description: String::new(),
        code_prompt: String::new(),
        runner_template: String::new(),
        evaluator: None,
        test_cases: cases
            .into_iter()
            .map(|(i, o)| TestCase {
                input: i.into(),
                expected_output: o.into(),
            })
            .collect(),
        reference_solutions: vec![],
        reference_distributions: None,
    }
}

fn submission(source: &str) -> CodeSubmission {
    CodeSubmission {
        source: source.into(),
        language: "python".into(),
        origin: SubmissionOrigin::Optimizer,
    }
}

#[test]
fn criterion_07_sandbox_measurement() {
    let _guard = timing_guard();
    let sandbox = Sandbox::default();
    let task = exec_task(vec![("5\n", "105")]);
    let limits = ExecutionLimits {
        timeout_s: 30.0,
        ..ExecutionLimits::default()
    };

    for run in 0..3 {
        let result = sandbox.execute(&submission(ALLOC_FIXTURE), &task, &limits).unwrap();
        let record = &result.record;
        assert!(record.passed, "run {run} failed: {}", result.stderr);
        assert!(
            (ALLOC_ORACLE_PEAK_KB * 0.85..=ALLOC_ORACLE_PEAK_KB * 1.15).contains(&record.peak_memory_kb),
            "run {run}: peak {} outside ±15% of {ALLOC_ORACLE_PEAK_KB}",
            record.peak_memory_kb
        );
        assert!(
            (ALLOC_ORACLE_TIME_S * 0.8..=ALLOC_ORACLE_TIME_S * 1.2).contains(&record.time_s),
            "run {run}: time {} outside ±20% of {ALLOC_ORACLE_TIME_S}",
            record.time_s
        );
        assert!(
            record.integral_kb_s <= record.peak_memory_kb * record.time_s * 1.05,
            "run {run}: integral bound violated"
        );
    }

    let timeout_limits = ExecutionLimits {
        timeout_s: 1.0,
        ..ExecutionLimits::default()
    };
    let result = sandbox
        .execute(&submission("while True:\n    pass"), &exec_task(vec![("x\n", "y")]), &timeout_limits)
        .unwrap();
    assert_eq!(result.record.failure_reason, Some(FailureReason::Timeout));
    assert_eq!(result.record.time_s, 1.0);
    pass(7, "sandbox measurement");
}

// ---------------------------------------------------------------------------
// 8. Greedy loop monotonicity under adversarial stubs
// ---------------------------------------------------------------------------

/// Replays a pre-drawn response sequence.
struct AdversarialStub {
    responses: Vec<String>,
    cursor: std::sync::atomic::AtomicUsize,
}

impl Optimizer for AdversarialStub {
    fn complete(&self, _s: &str, _u: &str) -> Result<String, OptimizerError> {
        let i = self.cursor.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
        match self.responses.get(i) {
            Some(r) => Ok(r.clone()),
            None => Err(OptimizerError::Transport("script exhausted".into())),
        }
    }
}

fn wrap_solution(code: &str) -> String {
    format!("<thinking>adversarial</thinking><solution>```python\n{code}\n```</solution>")
}

#[test]
fn criterion_08_greedy_loop_monotonicity() {
    let _guard = timing_guard();
    const RUNS: usize = 200;
    const N_ITER: u32 = 8;

    let echo_fast = "import sys\nsys.stdout.write(sys.stdin.read())";
    let echo_slow = "import sys, time\ntime.sleep(0.015)\nsys.stdout.write(sys.stdin.read())";
    let wrong = "print('nope')";
    let crash = "raise ValueError('boom')";
    let garbage = "no tags and no fences at all";
    let pool: Vec<String> = vec![
        wrap_solution(echo_fast),
        wrap_solution(echo_slow),
        wrap_solution(wrong),
        wrap_solution(crash),
        garbage.to_string(),
        wrap_solution(echo_fast),
    ];

    let task = exec_task(vec![("41\n", "41")]);
    let limits = ExecutionLimits {
        timeout_s: 10.0,
        ..ExecutionLimits::default()
    };

    let failures = Mutex::new(Vec::<String>::new());
    let next_run = std::sync::atomic::AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for worker in 0..2 {
            let pool = &pool;
            let task = &task;
            let limits = &limits;
            let failures = &failures;
            let next_run = &next_run;
            scope.spawn(move || {
                let sandbox = Sandbox::pinned(Default::default(), worker);
                loop {
                    let run = next_run.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    if run >= RUNS {
                        return;
                    }
                    let mut rng = ChaCha8Rng::seed_from_u64(run as u64);
                    let responses: Vec<String> = (0..=N_ITER)
                        .map(|_| pool[rng.gen_range(0..pool.len())].clone())
                        .collect();
                    let stub = AdversarialStub {
                        responses,
                        cursor: Default::default(),
                    };
                    let outcome = optimize(
                        task,
                        EfficiencyObjective::Time,
                        N_ITER,
                        &stub,
                        &sandbox,
                        limits,
                        "python",
                        None,
                    );

                    let check = || -> Result<(), String> {
                        if outcome.traces.len() != (N_ITER + 1) as usize {
                            return Err(format!("run {run}: trace length {}", outcome.traces.len()));
                        }
                        let mut was_passing = false;
                        let mut last_metric = f64::INFINITY;
                        for trace in &outcome.traces {
                            let best = &trace.best_record_after;
                            if was_passing && !best.passed {
                                return Err(format!("run {run}: passing incumbent evicted"));
                            }
                            if best.passed {
                                was_passing = true;
                                let metric = best.time_s;
                                if metric > last_metric {
                                    return Err(format!(
                                        "run {run}: metric worsened {last_metric} -> {metric}"
                                    ));
                                }
                                last_metric = metric;
                            }
                            if trace.accepted && !trace.candidate_record.passed {
                                return Err(format!("run {run}: failing candidate accepted"));
                            }
                        }
                        Ok(())
                    };
                    if let Err(msg) = check() {
                        failures.lock().unwrap().push(msg);
                    }
                }
            });
        }
    });

    let failures = failures.into_inner().unwrap();
    assert!(failures.is_empty(), "monotonicity violations: {failures:?}");
    pass(8, "greedy loop monotonicity");
}

// ---------------------------------------------------------------------------
// 9. End-to-end desk-scale experiment
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_end_to_end_experiment() {
    let _guard = timing_guard();
    let out = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        task_file: fixture("toy_tasks.json"),
        objective: EfficiencyObjective::Time,
        n_iter: 4,
        limits: ExecutionLimits {
            timeout_s: 30.0,
            repeats: 16,
            ..ExecutionLimits::default()
        },
        optimizer: Some(OptimizerDescriptor::Stub {
            script: fixture("stub_swap_at_3.json"),
        }),
        output_dir: out.path().to_path_buf(),
        seed: 7,
        workers: 2,
        ..RunConfig::default()
    };

    let records = cmd_optimize(&cfg).unwrap();
    assert_eq!(records.len(), 5);
    for record in &records {
        assert_eq!(record.traces.len(), 5, "initial generation + 4 rounds");
        let accepted: Vec<bool> = record.traces.iter().map(|t| t.accepted).collect();
        assert_eq!(
            accepted,
            vec![true, false, false, true, false],
            "task {}: acceptance pattern",
            record.task_id
        );
        assert!(record.final_record.passed);
        assert_eq!(record.rewards.len(), 5);
    }

    let store_path = out.path().join("runs.jsonl");
    let first_run_copy = out.path().join("first_run.jsonl");
    std::fs::copy(&store_path, &first_run_copy).unwrap();

    let report_dir = out.path().join("report");
    let curves = cmd_report(&first_run_copy, &report_dir).unwrap();
    assert_eq!(curves.len(), 1);
    let rows = &curves[0].rows;
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.pass_at_1 == 1.0), "pass@1 dips: {rows:?}");
    assert!(
        rows[3].beyond_t > rows[2].beyond_t,
        "Beyond-T fails to rise at the swap: {rows:?}"
    );
    assert_eq!(rows[0].beyond_t, rows[1].beyond_t);
    assert_eq!(rows[1].beyond_t, rows[2].beyond_t);
    assert_eq!(rows[3].beyond_t, rows[4].beyond_t);

    // curve values must be recomputable from the raw traces exactly
    let stored = read_records(&first_run_copy).unwrap();
    for (k, row) in rows.iter().enumerate() {
        let mut sum = 0.0;
        for record in &stored {
            let incumbent = record
                .traces
                .iter()
                .rev()
                .find(|t| t.iteration <= k as u32)
                .unwrap();
            let best = &incumbent.best_record_after;
            if best.passed {
                let d = record.reference_distributions.as_ref().unwrap();
                sum += percentile_rank(best.time_s, &d.time_s).unwrap();
            }
        }
        assert_eq!(row.beyond_t, sum / stored.len() as f64, "iteration {k}");
    }

    // rerun with the same seed appends records that are identical under the
    // determinism mask
    let records_again = cmd_optimize(&cfg).unwrap();
    assert_eq!(records_again.len(), 5);
    let all = read_records(&store_path).unwrap();
    assert_eq!(all.len(), 10, "append-only rerun");
    for (a, b) in all[..5].iter().zip(&all[5..]) {
        assert_eq!(a.task_id, b.task_id);
        assert_eq!(masked_value(a), masked_value(b), "task {} diverged", a.task_id);
    }
    pass(9, "end-to-end desk-scale experiment");
}

// ---------------------------------------------------------------------------
// 10. Bootstrap
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_bootstrap() {
    let defaults = BootstrapConfig::default();
    assert_eq!(defaults.replicates, 128);
    assert_eq!(defaults.per_task_draws, 4);
    assert_eq!(defaults.confidence, 0.95);

    // constant data: zero-width interval equal to the point estimate
    let mut data = BTreeMap::new();
    data.insert("a".to_string(), vec![0.37; 16]);
    data.insert("b".to_string(), vec![0.37; 16]);
    let ci = bootstrap_ci(&data, &defaults).unwrap();
    assert_eq!((ci.point, ci.lo, ci.hi), (0.37, 0.37, 0.37));

    // fixed seed reproduces the triple bit-exactly
    let mut data = BTreeMap::new();
    data.insert("a".to_string(), vec![0.1, 0.9, 0.4, 0.6]);
    data.insert("b".to_string(), vec![0.2, 0.8, 0.5, 0.5]);
    data.insert("c".to_string(), vec![0.0, 1.0, 0.3, 0.7]);
    let first = bootstrap_ci(&data, &defaults).unwrap();
    let second = bootstrap_ci(&data, &defaults).unwrap();
    assert_eq!(first, second);
    assert!(first.lo <= first.point && first.point <= first.hi);

    // increasing B converges the interval endpoints toward the large-B
    // limit; averaging over a handful of fixed seeds washes out draw luck
    let at = |replicates: u32, seed: u64| {
        let cfg = BootstrapConfig {
            replicates,
            seed,
            ..BootstrapConfig::default()
        };
        bootstrap_ci(&data, &cfg).unwrap()
    };
    let reference = at(16384, 999);
    let mean_error = |replicates: u32| {
        (0..10)
            .map(|seed| {
                let ci = at(replicates, seed);
                (ci.lo - reference.lo).abs() + (ci.hi - reference.hi).abs()
            })
            .sum::<f64>()
            / 10.0
    };
    let errors = [mean_error(32), mean_error(128), mean_error(512)];
    assert!(
        errors[0] > errors[1] && errors[1] > errors[2],
        "endpoints fail to converge with B: {errors:?}"
    );
    pass(10, "bootstrap");
}
