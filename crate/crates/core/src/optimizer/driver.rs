//! The iterative refinement loop: generate a candidate, measure it, keep it
//! only if it strictly beats the incumbent on the target objective.

use serde::{Deserialize, Serialize};

use crate::reward::{
    correctness_reward, efficiency_reward, final_reward, format_reward, RewardBreakdown,
    RewardConfig,
};
use crate::sandbox::{ExecutionLimits, Sandbox};
use crate::task::{
    objective_metric, CodeSubmission, EfficiencyObjective, FailureReason, PerformanceRecord,
    SubmissionOrigin, Task,
};

use super::parse::parse_response;
use super::prompt::{render_prompt, PromptContext};
use super::Optimizer;

/// One loop step: the candidate, its measurement, and the incumbent after
/// the greedy decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    /// 0 is the initial generation (present only when no seed code was
    /// given); optimization rounds count from 1.
    pub iteration: u32,
    pub candidate_code: String,
    pub candidate_record: PerformanceRecord,
    pub accepted: bool,
    pub best_code_after: String,
    pub best_record_after: PerformanceRecord,
    pub raw_response: String,
    pub thinking: String,
}

/// What an optimization run produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationOutcome {
    pub final_code: String,
    pub final_record: PerformanceRecord,
    pub traces: Vec<IterationTrace>,
    /// Measurement of caller-provided seed code, when there was one.
    pub seed_record: Option<PerformanceRecord>,
}

/// The strict `is better than` relation on measurements: a failing candidate
/// never wins, a passing candidate beats a missing or failing incumbent, and
/// between passing records the candidate must strictly improve the objective
/// metric — ties keep the incumbent.
pub fn compare(
    out: &PerformanceRecord,
    incumbent: Option<&PerformanceRecord>,
    objective: EfficiencyObjective,
) -> bool {
    if !out.passed {
        return false;
    }
    match incumbent {
        None => true,
        Some(inc) if !inc.passed => true,
        Some(inc) => {
            let out_metric = objective_metric(out, objective).expect("passing record has metric");
            let inc_metric = objective_metric(inc, objective).expect("passing record has metric");
            out_metric < inc_metric
        }
    }
}

/// Runs the full refinement procedure for one task.
///
/// Without seed code the first step asks the optimizer for an initial
/// solution (trace iteration 0); then `n_iter` rounds of
/// generate → measure → compare follow. A transport error, unparseable
/// response, or sandbox setup failure consumes its round and leaves the
/// incumbent standing — there is no abort path, so the final record may be a
/// failing one when nothing runnable ever appeared.
///
/// Candidates are measured once per round; re-measuring the incumbent would
/// let noise evict good code. Callers wanting a robust final number re-run
/// the winner with more repeats afterwards.
#[allow(clippy::too_many_arguments)]
pub fn optimize(
    task: &Task,
    objective: EfficiencyObjective,
    n_iter: u32,
    optimizer: &dyn Optimizer,
    sandbox: &Sandbox,
    limits: &ExecutionLimits,
    language: &str,
    seed_code: Option<String>,
) -> OptimizationOutcome {
    let loop_limits = ExecutionLimits {
        repeats: 1,
        ..limits.clone()
    };

    let mut traces: Vec<IterationTrace> = Vec::new();
    let mut best_code: String;
    let mut best_record: PerformanceRecord;
    let mut seed_record = None;

    match seed_code {
        Some(code) => {
            let record = measure(sandbox, &code, language, task, &loop_limits);
            seed_record = Some(record.clone());
            best_code = code;
            best_record = record;
        }
        None => {
            // Initial generation: empty original solution, no performance.
            let step = run_step(task, objective, optimizer, sandbox, &loop_limits, language, "", None);
            best_code = step.candidate_code.clone();
            best_record = step.candidate_record.clone();
            traces.push(IterationTrace {
                iteration: 0,
                accepted: compare(&step.candidate_record, None, objective),
                candidate_code: step.candidate_code,
                candidate_record: step.candidate_record,
                best_code_after: best_code.clone(),
                best_record_after: best_record.clone(),
                raw_response: step.raw_response,
                thinking: step.thinking,
            });
        }
    }

    for iteration in 1..=n_iter {
        let step = run_step(
            task,
            objective,
            optimizer,
            sandbox,
            &loop_limits,
            language,
            &best_code,
            Some(&best_record),
        );
        let accepted = compare(&step.candidate_record, Some(&best_record), objective);
        if accepted {
            best_code = step.candidate_code.clone();
            best_record = step.candidate_record.clone();
        }
        traces.push(IterationTrace {
            iteration,
            candidate_code: step.candidate_code,
            candidate_record: step.candidate_record,
            accepted,
            best_code_after: best_code.clone(),
            best_record_after: best_record.clone(),
            raw_response: step.raw_response,
            thinking: step.thinking,
        });
    }

    OptimizationOutcome {
        final_code: best_code,
        final_record: best_record,
        traces,
        seed_record,
    }
}

struct StepResult {
    candidate_code: String,
    candidate_record: PerformanceRecord,
    raw_response: String,
    thinking: String,
}

#[allow(clippy::too_many_arguments)]
fn run_step(
    task: &Task,
    objective: EfficiencyObjective,
    optimizer: &dyn Optimizer,
    sandbox: &Sandbox,
    limits: &ExecutionLimits,
    language: &str,
    original_code: &str,
    original_performance: Option<&PerformanceRecord>,
) -> StepResult {
    let ctx = PromptContext {
        problem_description: task.problem_description.clone(),
        efficiency_instruction: objective.instruction().to_string(),
        target_language: language.to_string(),
        original_code: original_code.to_string(),
        original_performance: original_performance.cloned(),
    };
    let (system_prompt, user_prompt) = render_prompt(&ctx);

    let raw_response = match optimizer.complete(&system_prompt, &user_prompt) {
        Ok(text) => text,
        Err(err) => {
            log::warn!("optimizer call failed for task {}: {err}", task.task_id);
            return StepResult {
                candidate_code: String::new(),
                candidate_record: no_candidate_record(),
                raw_response: format!("<transport error: {err}>"),
                thinking: String::new(),
            };
        }
    };

    let parsed = match parse_response(&raw_response) {
        Ok(parsed) => parsed,
        Err(err) => {
            log::warn!("unparseable response for task {}: {err}", task.task_id);
            return StepResult {
                candidate_code: String::new(),
                candidate_record: no_candidate_record(),
                raw_response,
                thinking: String::new(),
            };
        }
    };

    let candidate_record = measure(sandbox, &parsed.code, language, task, limits);
    StepResult {
        candidate_code: parsed.code,
        candidate_record,
        raw_response,
        thinking: parsed.thinking,
    }
}

/// A round that produced no runnable candidate at all.
fn no_candidate_record() -> PerformanceRecord {
    PerformanceRecord::failed(FailureReason::FormatError, 0.0, 0.0, 0.0)
}

fn measure(
    sandbox: &Sandbox,
    code: &str,
    language: &str,
    task: &Task,
    limits: &ExecutionLimits,
) -> PerformanceRecord {
    let submission = CodeSubmission {
        source: code.to_string(),
        language: language.to_string(),
        origin: SubmissionOrigin::Optimizer,
    };
    match sandbox.execute(&submission, task, limits) {
        Ok(result) => result.record,
        Err(err) => {
            // setup failures consume the round but are never WrongAnswer
            log::warn!("sandbox failure for task {}: {err}", task.task_id);
            PerformanceRecord::failed(FailureReason::RuntimeError, 0.0, 0.0, 0.0)
        }
    }
}

/// Recomputes the per-iteration reward breakdowns from a trace sequence.
/// The baseline for the first entry is the measured seed record (absent for
/// an initial generation, which scores against a failing, metric-less
/// baseline); afterwards it is the incumbent left by the previous entry.
pub fn reward_breakdowns(
    traces: &[IterationTrace],
    seed_record: Option<&PerformanceRecord>,
    objective: EfficiencyObjective,
    cfg: &RewardConfig,
) -> Vec<RewardBreakdown> {
    let mut breakdowns = Vec::with_capacity(traces.len());
    let mut baseline: Option<PerformanceRecord> = seed_record.cloned();
    for trace in traces {
        let a_in = baseline.as_ref().map(|r| r.passed).unwrap_or(false);
        let e_in = baseline.as_ref().and_then(|r| objective_metric(r, objective));
        let a_out = trace.candidate_record.passed;
        let e_out = objective_metric(&trace.candidate_record, objective).unwrap_or(0.0);

        let r_format = format_reward(&trace.raw_response);
        let r_correct = correctness_reward(a_in, a_out);
        let r_efficiency = efficiency_reward(e_in, e_out, a_out, objective, cfg);
        breakdowns.push(final_reward(r_format, r_correct, r_efficiency, cfg));

        baseline = Some(trace.best_record_after.clone());
    }
    breakdowns
}
