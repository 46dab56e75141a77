//! Execution sandbox: runs a candidate solution against a task's test cases
//! in an isolated child process under resource limits, sampling resident-set
//! memory to produce a [`PerformanceRecord`].
//!
//! Each execution gets a fresh temporary working directory and a child
//! process in its own process group. The whole test-case batch is delivered
//! over standard input in file order; wall-clock time, peak RSS (the larger
//! of OS accounting and the sampled maximum), and the RSS-over-time integral
//! are reported per execution.

mod exec;
mod judge;
mod pool;
mod runner;

pub use exec::Sandbox;
pub use judge::{judge, outputs_match, JudgeError, JudgeOutcome};
pub use pool::{ExecutionRequest, ExecutionResponse, SandboxPool};
pub use runner::{RunnerRegistry, RunnerSpec};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::task::PerformanceRecord;

/// Resource limits and measurement parameters for one execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExecutionLimits {
    /// Wall-clock timeout in seconds.
    pub timeout_s: f64,
    /// Resident-set ceiling in kilobytes.
    pub memory_limit_kb: u64,
    /// Memory sampling cadence in milliseconds.
    pub sample_interval_ms: u64,
    /// Fraction of one CPU granted to the child. Enforced by pinning the
    /// child to a single core; fractions below 1.0 are accepted but not
    /// throttled further.
    pub cpu_quota: f64,
    /// How many times `measure_repeated` runs the solution.
    pub repeats: u32,
    /// Byte cap applied to captured stdout/stderr.
    pub output_cap_bytes: usize,
}

impl Default for ExecutionLimits {
    fn default() -> Self {
        ExecutionLimits {
            timeout_s: 90.0,
            memory_limit_kb: 1_048_576,
            sample_interval_ms: 10,
            cpu_quota: 1.0,
            repeats: 1,
            output_cap_bytes: 1 << 20,
        }
    }
}

impl ExecutionLimits {
    pub fn validate(&self) -> Result<(), SandboxError> {
        if self.timeout_s <= 0.0 {
            return Err(SandboxError::InvalidLimits("timeout_s must be positive".into()));
        }
        if self.memory_limit_kb == 0 {
            return Err(SandboxError::InvalidLimits("memory_limit_kb must be positive".into()));
        }
        if self.sample_interval_ms < 1 {
            return Err(SandboxError::InvalidLimits("sample_interval_ms must be >= 1".into()));
        }
        if !(self.cpu_quota > 0.0 && self.cpu_quota <= 1.0) {
            return Err(SandboxError::InvalidLimits("cpu_quota must lie in (0, 1]".into()));
        }
        if self.repeats == 0 {
            return Err(SandboxError::InvalidLimits("repeats must be >= 1".into()));
        }
        Ok(())
    }
}

/// One instantaneous resident-set reading, seconds since process start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemorySample {
    pub t_s: f64,
    pub rss_kb: f64,
}

/// Everything observed from a single execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionResult {
    pub record: PerformanceRecord,
    pub samples: Vec<MemorySample>,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Error)]
pub enum SandboxError {
    #[error("no runner registered for language `{0}`")]
    RunnerNotRegistered(String),
    #[error("sandbox setup failure: {0}")]
    SetupFailure(String),
    #[error("invalid execution limits: {0}")]
    InvalidLimits(String),
    #[error("memory samples are not sorted by time")]
    UnsortedSamples,
}

/// Trapezoidal integral of sampled RSS over `[0, duration_s]`, in KB·s. The
/// first sample extends back to t=0 and the last forward to `duration_s` at
/// constant value; no samples means 0.
pub fn compute_integral(samples: &[MemorySample], duration_s: f64) -> Result<f64, SandboxError> {
    for pair in samples.windows(2) {
        if pair[1].t_s <= pair[0].t_s {
            return Err(SandboxError::UnsortedSamples);
        }
    }
    let Some(first) = samples.first() else {
        return Ok(0.0);
    };
    let last = samples.last().expect("non-empty");

    let mut integral = first.rss_kb * first.t_s.min(duration_s);
    for pair in samples.windows(2) {
        integral += 0.5 * (pair[0].rss_kb + pair[1].rss_kb) * (pair[1].t_s - pair[0].t_s);
    }
    if duration_s > last.t_s {
        integral += last.rss_kb * (duration_s - last.t_s);
    }
    Ok(integral)
}
