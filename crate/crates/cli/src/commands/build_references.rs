//! `build-references`: execute every reference solution and write the
//! measured time/memory/integral distributions back into a new task file.

use std::path::Path;
use std::sync::Mutex;

use anyhow::{bail, Result};
use serde::Serialize;

use perflab_core::metrics::TaskOutcome;
use perflab_core::sandbox::Sandbox;
use perflab_core::task::{
    load_task_set, serialize_task_set, CodeSubmission, EfficiencyObjective, ReferenceDistributions,
    SubmissionOrigin, Task,
};

use crate::config::RunConfig;

/// A reference solution dropped from the distributions.
#[derive(Debug, Clone, Serialize)]
pub struct ExcludedReference {
    pub task_id: String,
    pub solution_index: usize,
    pub reason: String,
}

#[derive(Debug, Serialize)]
pub struct BuildRefsSummary {
    pub tasks_updated: usize,
    /// Tasks whose references all failed; left without distributions.
    pub tasks_without_distributions: Vec<String>,
    pub excluded: Vec<ExcludedReference>,
}

fn measure_references(
    sandbox: &Sandbox,
    task: &Task,
    cfg: &RunConfig,
) -> (Option<ReferenceDistributions>, Vec<ExcludedReference>) {
    let mut dists = ReferenceDistributions {
        time_s: vec![],
        memory_kb: vec![],
        integral_kb_s: vec![],
    };
    let mut excluded = Vec::new();

    for (solution_index, source) in task.reference_solutions.iter().enumerate() {
        let submission = CodeSubmission {
            source: source.clone(),
            language: cfg.target_language.clone(),
            origin: SubmissionOrigin::Reference,
        };
        let exclusion_reason = match sandbox.measure_repeated(&submission, task, &cfg.limits) {
            Err(err) => Some(err.to_string()),
            Ok(results) => {
                let outcome =
                    TaskOutcome::new(&task.task_id, results.iter().map(|r| r.record.clone()).collect())
                        .expect("repeats >= 1");
                if outcome.passed() {
                    dists.time_s.push(
                        outcome.representative_metric(EfficiencyObjective::Time).unwrap(),
                    );
                    dists.memory_kb.push(
                        outcome.representative_metric(EfficiencyObjective::Memory).unwrap(),
                    );
                    dists.integral_kb_s.push(
                        outcome.representative_metric(EfficiencyObjective::Integral).unwrap(),
                    );
                    None
                } else {
                    let reason = outcome
                        .records
                        .iter()
                        .find_map(|r| r.failure_reason)
                        .map(|r| format!("{r:?}"))
                        .unwrap_or_else(|| "failed".into());
                    Some(format!("failed a repeat: {reason}"))
                }
            }
        };
        if let Some(reason) = exclusion_reason {
            excluded.push(ExcludedReference {
                task_id: task.task_id.clone(),
                solution_index,
                reason,
            });
        }
    }

    let dists = if dists.time_s.is_empty() { None } else { Some(dists) };
    (dists, excluded)
}

/// Measures all reference solutions (each `limits.repeats` times, median per
/// solution) and writes the updated task set to `out_file`. Solutions that
/// fail any repeat are excluded and reported; a task whose references all
/// fail is left distribution-less and flagged.
pub fn cmd_build_references(cfg: &RunConfig, out_file: &Path) -> Result<BuildRefsSummary> {
    cfg.validate()?;
    let tasks = load_task_set(&cfg.task_file)?;
    if tasks.iter().all(|t| t.reference_solutions.is_empty()) {
        bail!("no task in {} carries reference solutions", cfg.task_file.display());
    }
    let registry = cfg.runner_registry()?;

    let results = Mutex::new(Vec::new());
    let next_task = std::sync::atomic::AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for worker in 0..cfg.workers.max(1) {
            let registry = registry.clone();
            let tasks = &tasks;
            let results = &results;
            let next_task = &next_task;
            scope.spawn(move || {
                let sandbox = Sandbox::pinned(registry, worker);
                loop {
                    let idx = next_task.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    let Some(task) = tasks.get(idx) else { return };
                    let measured = measure_references(&sandbox, task, cfg);
                    results.lock().unwrap().push((idx, measured));
                }
            });
        }
    });

    let mut measured = results.into_inner().unwrap();
    measured.sort_by_key(|(idx, _)| *idx);

    let mut updated_tasks = tasks;
    let mut summary = BuildRefsSummary {
        tasks_updated: 0,
        tasks_without_distributions: vec![],
        excluded: vec![],
    };
    for (idx, (dists, excluded)) in measured {
        summary.excluded.extend(excluded);
        match dists {
            Some(d) => {
                updated_tasks[idx].reference_distributions = Some(d);
                summary.tasks_updated += 1;
            }
            None => {
                updated_tasks[idx].reference_distributions = None;
                summary
                    .tasks_without_distributions
                    .push(updated_tasks[idx].task_id.clone());
            }
        }
    }

    if let Some(parent) = out_file.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(out_file, serialize_task_set(&updated_tasks))?;
    Ok(summary)
}
