//! Task data model: problems, test cases, submissions, and measured performance.
//!
//! Tasks are ingested from a JSON file (an array of task objects) and are
//! immutable after construction. All units are fixed globally: seconds for
//! time, kilobytes for peak memory, kilobyte-seconds for the integral score.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance applied when checking `integral <= peak * time` — the sampler
/// quantizes time, so the trapezoid can slightly overshoot the product.
pub const SAMPLING_TOLERANCE: f64 = 0.05;

/// The efficiency dimension an optimization run targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EfficiencyObjective {
    Time,
    Memory,
    Integral,
}

impl EfficiencyObjective {
    pub const ALL: [EfficiencyObjective; 3] = [
        EfficiencyObjective::Time,
        EfficiencyObjective::Memory,
        EfficiencyObjective::Integral,
    ];

    /// The instruction phrase used in prompts for this objective.
    pub fn instruction(&self) -> &'static str {
        match self {
            EfficiencyObjective::Time => "time-efficient",
            EfficiencyObjective::Memory => "memory-efficient",
            EfficiencyObjective::Integral => "integral-efficient",
        }
    }

    /// Maps an instruction phrase back to an objective. The combined
    /// "both time and memory efficient" phrasing maps to `Integral`,
    /// which is the combined metric.
    pub fn from_instruction(text: &str) -> Option<Self> {
        match text.trim() {
            "time-efficient" => Some(EfficiencyObjective::Time),
            "memory-efficient" => Some(EfficiencyObjective::Memory),
            "integral-efficient" | "both time and memory efficient" => {
                Some(EfficiencyObjective::Integral)
            }
            _ => None,
        }
    }
}

impl fmt::Display for EfficiencyObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EfficiencyObjective::Time => write!(f, "time"),
            EfficiencyObjective::Memory => write!(f, "memory"),
            EfficiencyObjective::Integral => write!(f, "integral"),
        }
    }
}

/// One stdin/stdout test case. `input` is fed to the solution over standard
/// input; `expected_output` may be empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub input: String,
    pub expected_output: String,
}

/// Reference performance distributions collected from reference solutions,
/// one entry per solution: time in seconds, peak memory in KB, integral in
/// KB·s. The three lists are index-aligned and equal in length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceDistributions {
    pub time_s: Vec<f64>,
    pub memory_kb: Vec<f64>,
    pub integral_kb_s: Vec<f64>,
}

impl ReferenceDistributions {
    pub fn for_objective(&self, objective: EfficiencyObjective) -> &[f64] {
        match objective {
            EfficiencyObjective::Time => &self.time_s,
            EfficiencyObjective::Memory => &self.memory_kb,
            EfficiencyObjective::Integral => &self.integral_kb_s,
        }
    }

    pub fn len(&self) -> usize {
        self.time_s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time_s.is_empty()
    }
}

/// A benchmark task: problem statement, harness code, test cases, and
/// (optionally) reference solutions with their measured distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub task_id: String,
    pub title: String,
    pub problem_description: String,
    pub code_prompt: String,
    /// Wraps a solution for stdin/stdout execution; `{solution}` is replaced
    /// by the submission source. Empty means the solution runs verbatim.
    pub runner_template: String,
    /// Optional output-equivalence checker program (run per test case);
    /// absent means normalized exact match.
    pub evaluator: Option<String>,
    pub test_cases: Vec<TestCase>,
    pub reference_solutions: Vec<String>,
    pub reference_distributions: Option<ReferenceDistributions>,
}

impl Task {
    /// Applies the runner template to a solution source.
    pub fn wrap_solution(&self, source: &str) -> String {
        if self.runner_template.is_empty() {
            source.to_string()
        } else {
            self.runner_template.replace("{solution}", source)
        }
    }

    fn check_invariants(&self) -> Result<(), String> {
        if self.task_id.is_empty() {
            return Err("task_id is empty".into());
        }
        if self.test_cases.is_empty() {
            return Err("test_cases is empty".into());
        }
        if let Some(dists) = &self.reference_distributions {
            let (t, m, i) = (
                dists.time_s.len(),
                dists.memory_kb.len(),
                dists.integral_kb_s.len(),
            );
            if t != m || t != i {
                return Err(format!(
                    "reference distribution lengths differ: time {t}, memory {m}, integral {i}"
                ));
            }
            if t == 0 {
                return Err("reference distributions present but empty".into());
            }
            for v in dists
                .time_s
                .iter()
                .chain(&dists.memory_kb)
                .chain(&dists.integral_kb_s)
            {
                if !v.is_finite() || *v < 0.0 {
                    return Err(format!("reference distribution value {v} is not a finite non-negative number"));
                }
            }
        }
        Ok(())
    }
}

/// Who produced a piece of code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubmissionOrigin {
    /// The seed code for a run; may be empty when the first iteration
    /// generates the initial solution.
    Initial,
    Optimizer,
    Reference,
}

/// A piece of source code to execute, tagged with its runner language.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSubmission {
    pub source: String,
    pub language: String,
    pub origin: SubmissionOrigin,
}

impl CodeSubmission {
    pub fn new(
        source: impl Into<String>,
        language: impl Into<String>,
        origin: SubmissionOrigin,
    ) -> Result<Self, TaskError> {
        let source = source.into();
        if source.is_empty() && origin != SubmissionOrigin::Initial {
            return Err(TaskError::EmptySubmission { origin });
        }
        Ok(CodeSubmission {
            source,
            language: language.into(),
            origin,
        })
    }
}

/// Why an execution did not pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    WrongAnswer,
    Timeout,
    MemoryLimit,
    RuntimeError,
    CompileError,
    FormatError,
}

/// The measured outcome of running one solution against a task's test cases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceRecord {
    pub passed: bool,
    /// Wall-clock duration in seconds, clipped to the configured timeout.
    pub time_s: f64,
    /// max(OS peak-RSS accounting, maximum sampled RSS), in KB.
    pub peak_memory_kb: f64,
    /// Trapezoidal integral of sampled RSS over the run, in KB·s.
    pub integral_kb_s: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failure_reason: Option<FailureReason>,
}

impl PerformanceRecord {
    pub fn passing(time_s: f64, peak_memory_kb: f64, integral_kb_s: f64) -> Self {
        PerformanceRecord {
            passed: true,
            time_s,
            peak_memory_kb,
            integral_kb_s,
            failure_reason: None,
        }
    }

    pub fn failed(
        reason: FailureReason,
        time_s: f64,
        peak_memory_kb: f64,
        integral_kb_s: f64,
    ) -> Self {
        PerformanceRecord {
            passed: false,
            time_s,
            peak_memory_kb,
            integral_kb_s,
            failure_reason: Some(reason),
        }
    }

    /// Checks the record's internal consistency rules.
    pub fn validate(&self) -> Result<(), String> {
        if self.passed && self.failure_reason.is_some() {
            return Err("passed record carries a failure_reason".into());
        }
        if !self.passed && self.failure_reason.is_none() {
            return Err("failed record lacks a failure_reason".into());
        }
        if self.time_s < 0.0 || self.peak_memory_kb < 0.0 || self.integral_kb_s < 0.0 {
            return Err("negative measurement".into());
        }
        let bound = self.peak_memory_kb * self.time_s * (1.0 + SAMPLING_TOLERANCE);
        if self.integral_kb_s > bound && self.peak_memory_kb > 0.0 {
            return Err(format!(
                "integral {} exceeds peak*time bound {}",
                self.integral_kb_s, bound
            ));
        }
        Ok(())
    }
}

/// Selects the record's metric for an objective; absent when the run failed.
pub fn objective_metric(
    record: &PerformanceRecord,
    objective: EfficiencyObjective,
) -> Option<f64> {
    if !record.passed {
        return None;
    }
    Some(match objective {
        EfficiencyObjective::Time => record.time_s,
        EfficiencyObjective::Memory => record.peak_memory_kb,
        EfficiencyObjective::Integral => record.integral_kb_s,
    })
}

/// One invariant breach found during ingestion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantViolation {
    pub task_id: String,
    pub reason: String,
}

impl fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.task_id, self.reason)
    }
}

#[derive(Debug, Error)]
pub enum TaskError {
    #[error("malformed task document: {0}")]
    MalformedDocument(String),
    #[error("task invariant violations: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvariantViolation { violations: Vec<InvariantViolation> },
    #[error("duplicate task_id `{0}`")]
    DuplicateTaskId(String),
    #[error("submission with origin {origin:?} has empty source")]
    EmptySubmission { origin: SubmissionOrigin },
    #[error("cannot read task file: {0}")]
    Io(#[from] std::io::Error),
}

/// Loads a task set from a JSON file, validating every task invariant.
/// File order is preserved. All invariant violations are reported together.
pub fn load_task_set(path: impl AsRef<Path>) -> Result<Vec<Task>, TaskError> {
    let text = std::fs::read_to_string(path)?;
    parse_task_set(&text)
}

/// Parses a task set from JSON text; see [`load_task_set`].
pub fn parse_task_set(text: &str) -> Result<Vec<Task>, TaskError> {
    let tasks: Vec<Task> =
        serde_json::from_str(text).map_err(|e| TaskError::MalformedDocument(e.to_string()))?;

    let mut seen = HashSet::new();
    for task in &tasks {
        if !task.task_id.is_empty() && !seen.insert(task.task_id.clone()) {
            return Err(TaskError::DuplicateTaskId(task.task_id.clone()));
        }
    }

    let violations: Vec<InvariantViolation> = tasks
        .iter()
        .filter_map(|t| {
            t.check_invariants().err().map(|reason| InvariantViolation {
                task_id: t.task_id.clone(),
                reason,
            })
        })
        .collect();
    if !violations.is_empty() {
        return Err(TaskError::InvariantViolation { violations });
    }
    Ok(tasks)
}

/// Serializes a task set back to the on-disk JSON format.
pub fn serialize_task_set(tasks: &[Task]) -> String {
    serde_json::to_string_pretty(tasks).expect("task set serializes")
}
