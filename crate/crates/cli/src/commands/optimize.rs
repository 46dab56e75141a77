//! `optimize`: run the refinement loop over every task and persist one run
//! record per task as JSONL.

use std::sync::Mutex;

use anyhow::{bail, Result};
use chrono::Utc;

use perflab_core::metrics::TaskOutcome;
use perflab_core::optimizer::{optimize, reward_breakdowns};
use perflab_core::sandbox::Sandbox;
use perflab_core::store::{append_records, new_run_id, RunRecord};
use perflab_core::task::{
    load_task_set, objective_metric, CodeSubmission, FailureReason, PerformanceRecord,
    SubmissionOrigin,
};

use crate::config::RunConfig;

/// Re-measures the loop winner with the evaluation-protocol repeat count and
/// condenses the repeats into one representative record (medians; passing
/// only when every repeat passed).
fn remeasure_winner(
    sandbox: &Sandbox,
    code: &str,
    language: &str,
    task: &perflab_core::task::Task,
    cfg: &RunConfig,
) -> PerformanceRecord {
    let submission = CodeSubmission {
        source: code.to_string(),
        language: language.to_string(),
        origin: SubmissionOrigin::Optimizer,
    };
    let results = match sandbox.measure_repeated(&submission, task, &cfg.limits) {
        Ok(results) => results,
        Err(err) => {
            log::warn!("final re-measurement failed for {}: {err}", task.task_id);
            return PerformanceRecord::failed(FailureReason::RuntimeError, 0.0, 0.0, 0.0);
        }
    };
    let outcome = TaskOutcome::new(&task.task_id, results.iter().map(|r| r.record.clone()).collect())
        .expect("repeats >= 1");
    let median = |objective| outcome.representative_metric(objective);
    if outcome.passed() {
        PerformanceRecord::passing(
            median(perflab_core::task::EfficiencyObjective::Time).unwrap_or(0.0),
            median(perflab_core::task::EfficiencyObjective::Memory).unwrap_or(0.0),
            median(perflab_core::task::EfficiencyObjective::Integral).unwrap_or(0.0),
        )
    } else {
        let failure = outcome
            .records
            .iter()
            .find_map(|r| r.failure_reason)
            .unwrap_or(FailureReason::WrongAnswer);
        let worst = outcome.records.iter().find(|r| !r.passed).expect("some repeat failed");
        PerformanceRecord::failed(failure, worst.time_s, worst.peak_memory_kb, worst.integral_kb_s)
    }
}

/// Runs the loop on every task (task-level parallelism, per-worker pinned
/// sandboxes) and appends records to `<output_dir>/runs.jsonl` in task
/// order. Per-task failures land in their records; the command only fails on
/// configuration problems.
pub fn cmd_optimize(cfg: &RunConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let Some(descriptor) = &cfg.optimizer else {
        bail!("optimize needs an optimizer (stub script or endpoint) in the config");
    };
    let tasks = load_task_set(&cfg.task_file)?;
    if tasks.is_empty() {
        bail!("task file {} contains no tasks", cfg.task_file.display());
    }
    let registry = cfg.runner_registry()?;
    let config_snapshot = cfg.snapshot();

    let records = Mutex::new(Vec::<RunRecord>::new());
    let next_task = std::sync::atomic::AtomicUsize::new(0);
    let worker_count = cfg.workers.max(1);

    std::thread::scope(|scope| -> Result<()> {
        let mut handles = Vec::new();
        for worker in 0..worker_count {
            let registry = registry.clone();
            let tasks = &tasks;
            let records = &records;
            let next_task = &next_task;
            let config_snapshot = &config_snapshot;
            handles.push(scope.spawn(move || -> Result<()> {
                let sandbox = Sandbox::pinned(registry, worker);
                loop {
                    let idx = next_task.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    let Some(task) = tasks.get(idx) else {
                        return Ok(());
                    };
                    let optimizer = descriptor.build()?;
                    let outcome = optimize(
                        task,
                        cfg.objective,
                        cfg.n_iter,
                        optimizer.as_ref(),
                        &sandbox,
                        &cfg.limits,
                        &cfg.target_language,
                        None,
                    );
                    for trace in &outcome.traces {
                        println!(
                            "task {} iter {} accepted={} metric={}",
                            task.task_id,
                            trace.iteration,
                            trace.accepted,
                            objective_metric(&trace.best_record_after, cfg.objective)
                                .map(|v| format!("{v:.4}"))
                                .unwrap_or_else(|| "failed".into()),
                        );
                    }
                    let rewards = reward_breakdowns(
                        &outcome.traces,
                        outcome.seed_record.as_ref(),
                        cfg.objective,
                        &cfg.reward,
                    );
                    let final_record = if outcome.final_record.passed && !outcome.final_code.is_empty()
                    {
                        remeasure_winner(&sandbox, &outcome.final_code, &cfg.target_language, task, cfg)
                    } else {
                        outcome.final_record.clone()
                    };
                    records.lock().unwrap().push(RunRecord {
                        run_id: new_run_id(&task.task_id),
                        timestamp: Utc::now(),
                        task_id: task.task_id.clone(),
                        objective: cfg.objective,
                        traces: outcome.traces,
                        final_code: outcome.final_code,
                        final_record,
                        rewards,
                        config: config_snapshot.clone(),
                        reference_distributions: task.reference_distributions.clone(),
                    });
                }
            }));
        }
        for handle in handles {
            handle.join().expect("optimize worker")?;
        }
        Ok(())
    })?;

    let mut records = records.into_inner().unwrap();
    records.sort_by(|a, b| a.task_id.cmp(&b.task_id));

    std::fs::create_dir_all(&cfg.output_dir)?;
    append_records(cfg.output_dir.join("runs.jsonl"), &records)?;
    Ok(records)
}
