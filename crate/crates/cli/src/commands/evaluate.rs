//! `evaluate`: measure one solution per task with the evaluation protocol
//! and produce the benchmark report.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Mutex;

use anyhow::{bail, Context, Result};

use perflab_core::metrics::{
    bootstrap_ci, categorize_vs_human, pass_at_1, BenchmarkReport, ObjectiveCategories,
    ScoreWithCi, TaskOutcome,
};
use perflab_core::optimizer::{parse_response, render_prompt, PromptContext};
use perflab_core::sandbox::Sandbox;
use perflab_core::task::{
    load_task_set, objective_metric, CodeSubmission, EfficiencyObjective, FailureReason,
    PerformanceRecord, SubmissionOrigin, Task,
};

use crate::config::RunConfig;

/// One task's solution text, or the reason there is none.
fn solution_for_task(cfg: &RunConfig, task: &Task) -> Result<Option<String>> {
    if let Some(dir) = &cfg.solutions_dir {
        return Ok(read_solution_file(dir, &task.task_id));
    }
    let Some(descriptor) = &cfg.optimizer else {
        bail!("evaluate needs either solutions_dir or an optimizer");
    };
    // single-shot generation: the initial-generation prompt, one completion
    let optimizer = descriptor.build()?;
    let ctx = PromptContext {
        problem_description: task.problem_description.clone(),
        efficiency_instruction: cfg.objective.instruction().to_string(),
        target_language: cfg.target_language.clone(),
        original_code: String::new(),
        original_performance: None,
    };
    let (system, user) = render_prompt(&ctx);
    match optimizer.complete(&system, &user) {
        Ok(response) => Ok(parse_response(&response).ok().map(|p| p.code)),
        Err(err) => {
            log::warn!("generation failed for task {}: {err}", task.task_id);
            Ok(None)
        }
    }
}

fn read_solution_file(dir: &Path, task_id: &str) -> Option<String> {
    let entries = std::fs::read_dir(dir).ok()?;
    for entry in entries.flatten() {
        let path = entry.path();
        if path.is_file() && path.file_stem().map(|s| s == task_id).unwrap_or(false) {
            return std::fs::read_to_string(&path).ok();
        }
    }
    None
}

fn failed_outcome(task_id: &str) -> TaskOutcome {
    TaskOutcome::new(
        task_id,
        vec![PerformanceRecord::failed(FailureReason::FormatError, 0.0, 0.0, 0.0)],
    )
    .expect("single record")
}

/// Measures every task's solution `repeats` times and assembles Pass@1,
/// Beyond-{T,M,I} with bootstrap CIs, and the vs-human category table.
/// Tasks without a runnable solution (or hit by sandbox failures) count as
/// Failed rather than aborting the run.
pub fn cmd_evaluate(cfg: &RunConfig) -> Result<BenchmarkReport> {
    cfg.validate()?;
    let tasks = load_task_set(&cfg.task_file)?;
    if tasks.is_empty() {
        bail!("task file {} contains no tasks", cfg.task_file.display());
    }
    if let Some(dir) = &cfg.solutions_dir {
        let available = std::fs::read_dir(dir)
            .with_context(|| format!("reading solutions dir {}", dir.display()))?
            .filter_map(|e| e.ok())
            .filter(|e| e.path().is_file())
            .count();
        if available == 0 {
            bail!("solutions directory {} is empty", dir.display());
        }
    }

    let registry = cfg.runner_registry()?;
    let outcomes = Mutex::new(Vec::<TaskOutcome>::new());
    let worker_count = cfg.workers.max(1);
    let next_task = std::sync::atomic::AtomicUsize::new(0);

    std::thread::scope(|scope| -> Result<()> {
        let mut handles = Vec::new();
        for worker in 0..worker_count {
            let registry = registry.clone();
            let tasks = &tasks;
            let outcomes = &outcomes;
            let next_task = &next_task;
            handles.push(scope.spawn(move || -> Result<()> {
                let sandbox = Sandbox::pinned(registry, worker);
                loop {
                    let idx = next_task.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    let Some(task) = tasks.get(idx) else {
                        return Ok(());
                    };
                    let outcome = match solution_for_task(cfg, task)? {
                        None => {
                            log::warn!("no solution for task {}", task.task_id);
                            failed_outcome(&task.task_id)
                        }
                        Some(source) if source.trim().is_empty() => failed_outcome(&task.task_id),
                        Some(source) => {
                            let submission = CodeSubmission {
                                source,
                                language: cfg.target_language.clone(),
                                origin: SubmissionOrigin::Reference,
                            };
                            match sandbox.measure_repeated(&submission, task, &cfg.limits) {
                                Ok(results) => TaskOutcome::new(
                                    &task.task_id,
                                    results.into_iter().map(|r| r.record).collect(),
                                )
                                .expect("repeats >= 1"),
                                Err(err) => {
                                    log::warn!("sandbox failure on task {}: {err}", task.task_id);
                                    failed_outcome(&task.task_id)
                                }
                            }
                        }
                    };
                    outcomes.lock().unwrap().push(outcome);
                }
            }));
        }
        for handle in handles {
            handle.join().expect("evaluate worker")?;
        }
        Ok(())
    })?;

    let mut outcomes = outcomes.into_inner().unwrap();
    outcomes.sort_by(|a, b| a.task_id.cmp(&b.task_id));
    build_report(&tasks, &outcomes, cfg)
}

/// Assembles the report from measured outcomes.
pub fn build_report(
    tasks: &[Task],
    outcomes: &[TaskOutcome],
    cfg: &RunConfig,
) -> Result<BenchmarkReport> {
    let by_id: BTreeMap<&str, &Task> = tasks.iter().map(|t| (t.task_id.as_str(), t)).collect();
    let pass = pass_at_1(outcomes).map_err(|e| anyhow::anyhow!(e.to_string()))?;

    let mut beyond = Vec::with_capacity(3);
    for (slot, objective) in EfficiencyObjective::ALL.iter().enumerate() {
        // per task: one PR value per repeat (failed tasks pin the task to 0)
        let mut per_task: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for outcome in outcomes {
            let task = by_id
                .get(outcome.task_id.as_str())
                .ok_or_else(|| anyhow::anyhow!("unknown task_id {}", outcome.task_id))?;
            let Some(dists) = &task.reference_distributions else {
                bail!("task {} has no reference distributions", task.task_id);
            };
            let d = dists.for_objective(*objective);
            let values = if outcome.passed() {
                outcome
                    .records
                    .iter()
                    .map(|r| {
                        let v = objective_metric(r, *objective).expect("passing record");
                        perflab_core::metrics::percentile_rank(v, d)
                            .map_err(|e| anyhow::anyhow!(e.to_string()))
                    })
                    .collect::<Result<Vec<f64>>>()?
            } else {
                vec![0.0]
            };
            per_task.insert(outcome.task_id.clone(), values);
        }
        let mut bootstrap_cfg = cfg.bootstrap.clone();
        bootstrap_cfg.seed = cfg.bootstrap.seed.wrapping_add(slot as u64);
        let ci = bootstrap_ci(&per_task, &bootstrap_cfg).map_err(|e| anyhow::anyhow!(e.to_string()))?;
        beyond.push(ScoreWithCi {
            point: ci.point,
            ci: Some((ci.lo, ci.hi)),
        });
    }

    let mut categories = BTreeMap::new();
    for outcome in outcomes {
        let task = by_id[outcome.task_id.as_str()];
        let dists = task.reference_distributions.as_ref().expect("checked above");
        let category = |objective: EfficiencyObjective| {
            categorize_vs_human(
                outcome.representative_metric(objective),
                dists.for_objective(objective),
            )
            .expect("non-empty distribution")
        };
        categories.insert(
            outcome.task_id.clone(),
            ObjectiveCategories {
                time: category(EfficiencyObjective::Time),
                memory: category(EfficiencyObjective::Memory),
                integral: category(EfficiencyObjective::Integral),
            },
        );
    }

    Ok(BenchmarkReport {
        pass_at_1: pass,
        beyond_t: beyond[0],
        beyond_m: beyond[1],
        beyond_i: beyond[2],
        categories,
    })
}

/// Writes the report JSON next to the other run artifacts.
pub fn write_report(report: &BenchmarkReport, out_dir: &Path) -> Result<std::path::PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join("report.json");
    std::fs::write(&path, serde_json::to_string_pretty(report)?)?;
    Ok(path)
}
