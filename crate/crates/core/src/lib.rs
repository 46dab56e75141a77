//! Closed-loop code-efficiency optimization: an execution sandbox that
//! measures time, peak memory, and the memory-time integral of candidate
//! solutions; percentile-rank efficiency metrics with bootstrap confidence
//! intervals; reward shaping for optimization roll-outs; and a greedy
//! iterative refinement loop around a pluggable code generator.

pub mod metrics;
pub mod optimizer;
pub mod report;
pub mod reward;
pub mod sandbox;
pub mod store;
pub mod task;

pub use optimizer::{compare, optimize, Optimizer, OptimizerError};
pub use sandbox::{ExecutionLimits, ExecutionResult, Sandbox, SandboxError, SandboxPool};
pub use task::{
    load_task_set, objective_metric, CodeSubmission, EfficiencyObjective, FailureReason,
    PerformanceRecord, Task, TaskError, TestCase,
};
