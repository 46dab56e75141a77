//! Correctness and efficiency scoring: Pass@1, percentile ranks against
//! reference distributions, Beyond-{T,M,I}, better/worse-than-human
//! categories, and bootstrap confidence intervals.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::task::{objective_metric, EfficiencyObjective, PerformanceRecord, Task};

/// All measurements for one task: one record per repeat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskOutcome {
    pub task_id: String,
    pub records: Vec<PerformanceRecord>,
}

impl TaskOutcome {
    pub fn new(task_id: impl Into<String>, records: Vec<PerformanceRecord>) -> Result<Self, MetricsError> {
        if records.is_empty() {
            return Err(MetricsError::EmptyOutcome);
        }
        Ok(TaskOutcome {
            task_id: task_id.into(),
            records,
        })
    }

    /// A task counts as passed only when every repeat passed; a flaky wrong
    /// answer is a failure.
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    /// Median of the per-repeat metrics; absent when the task failed.
    pub fn representative_metric(&self, objective: EfficiencyObjective) -> Option<f64> {
        if !self.passed() {
            return None;
        }
        let mut values: Vec<f64> = self
            .records
            .iter()
            .filter_map(|r| objective_metric(r, objective))
            .collect();
        if values.is_empty() {
            return None;
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite metrics"));
        let n = values.len();
        Some(if n % 2 == 1 {
            values[n / 2]
        } else {
            (values[n / 2 - 1] + values[n / 2]) / 2.0
        })
    }
}

/// Placement of a measured value against the human reference range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PerformanceCategory {
    /// Strictly below every reference value.
    Better,
    /// Within the reference range (ties with min or max included).
    Mediocre,
    /// Strictly above every reference value.
    Worse,
    /// The solution did not pass, so it has no defined metric.
    Failed,
}

/// Bootstrap resampling parameters. `replicates` is the number of bootstrap
/// replicates and `per_task_draws` how many values are drawn (with
/// replacement) per task inside each replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapConfig {
    pub replicates: u32,
    pub per_task_draws: u32,
    pub confidence: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            replicates: 128,
            per_task_draws: 4,
            confidence: 0.95,
            seed: 0,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<(), MetricsError> {
        if self.replicates < 1 || self.per_task_draws < 1 {
            return Err(MetricsError::InvalidConfig(
                "replicates and per_task_draws must be >= 1".into(),
            ));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(MetricsError::InvalidConfig(
                "confidence must lie strictly between 0 and 1".into(),
            ));
        }
        Ok(())
    }
}

/// A point estimate with an empirical confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub point: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Task-averaged percentile ranks for the three efficiency dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeyondScores {
    pub beyond_t: f64,
    pub beyond_m: f64,
    pub beyond_i: f64,
}

/// A score with an optional bootstrap CI attached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreWithCi {
    pub point: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ci: Option<(f64, f64)>,
}

/// Categories of one task's solution under each objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectiveCategories {
    pub time: PerformanceCategory,
    pub memory: PerformanceCategory,
    pub integral: PerformanceCategory,
}

/// The full benchmark summary for a task set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub pass_at_1: f64,
    pub beyond_t: ScoreWithCi,
    pub beyond_m: ScoreWithCi,
    pub beyond_i: ScoreWithCi,
    pub categories: BTreeMap<String, ObjectiveCategories>,
}

impl BenchmarkReport {
    /// Renders the report as an aligned text table (scores in percent).
    pub fn render_table(&self) -> String {
        let fmt_score = |s: &ScoreWithCi| match s.ci {
            Some((lo, hi)) => format!("{:6.2} ({:.2}, {:.2})", s.point * 100.0, lo * 100.0, hi * 100.0),
            None => format!("{:6.2}", s.point * 100.0),
        };
        let mut out = String::new();
        out.push_str(&format!(
            "{:<10} {:<24} {:<24} {:<24}\n",
            "Pass@1", "Beyond-T", "Beyond-M", "Beyond-I"
        ));
        out.push_str(&format!(
            "{:<10.2} {:<24} {:<24} {:<24}\n",
            self.pass_at_1 * 100.0,
            fmt_score(&self.beyond_t),
            fmt_score(&self.beyond_m),
            fmt_score(&self.beyond_i),
        ));
        out
    }
}

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("reference distribution is empty")]
    EmptyDistribution,
    #[error("outcome set is empty")]
    EmptyOutcomeSet,
    #[error("task outcome has no records")]
    EmptyOutcome,
    #[error("unknown task_id `{0}`")]
    UnknownTaskId(String),
    #[error("task `{0}` has no values to bootstrap")]
    EmptyTaskValues(String),
    #[error("invalid metrics config: {0}")]
    InvalidConfig(String),
}

/// Fraction of reference values greater than or equal to `x`. Lower absolute
/// cost therefore earns a higher rank; ties count in `x`'s favor.
pub fn percentile_rank(x: f64, d: &[f64]) -> Result<f64, MetricsError> {
    if d.is_empty() {
        return Err(MetricsError::EmptyDistribution);
    }
    let hits = d.iter().filter(|&&v| v >= x).count();
    Ok(hits as f64 / d.len() as f64)
}

/// Fraction of tasks whose representative outcome passed.
pub fn pass_at_1(outcomes: &[TaskOutcome]) -> Result<f64, MetricsError> {
    if outcomes.is_empty() {
        return Err(MetricsError::EmptyOutcomeSet);
    }
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    Ok(passed as f64 / outcomes.len() as f64)
}

/// Task-averaged percentile ranks per objective. Failed tasks contribute a
/// rank of 0 while still counting in the denominator.
pub fn beyond_scores(outcomes: &[TaskOutcome], tasks: &[Task]) -> Result<BeyondScores, MetricsError> {
    if outcomes.is_empty() {
        return Err(MetricsError::EmptyOutcomeSet);
    }
    let by_id: BTreeMap<&str, &Task> = tasks.iter().map(|t| (t.task_id.as_str(), t)).collect();
    let mut sums = [0.0f64; 3];
    for outcome in outcomes {
        let task = by_id
            .get(outcome.task_id.as_str())
            .ok_or_else(|| MetricsError::UnknownTaskId(outcome.task_id.clone()))?;
        let dists = task
            .reference_distributions
            .as_ref()
            .ok_or(MetricsError::EmptyDistribution)?;
        for (slot, objective) in EfficiencyObjective::ALL.iter().enumerate() {
            if let Some(value) = outcome.representative_metric(*objective) {
                sums[slot] += percentile_rank(value, dists.for_objective(*objective))?;
            }
        }
    }
    let n = outcomes.len() as f64;
    Ok(BeyondScores {
        beyond_t: sums[0] / n,
        beyond_m: sums[1] / n,
        beyond_i: sums[2] / n,
    })
}

/// Places a metric against the human range: strictly below every reference
/// is `Better`, strictly above every reference is `Worse`, ties land in
/// `Mediocre`, and a missing metric (failed run) is `Failed`.
pub fn categorize_vs_human(x: Option<f64>, d: &[f64]) -> Result<PerformanceCategory, MetricsError> {
    if d.is_empty() {
        return Err(MetricsError::EmptyDistribution);
    }
    let Some(x) = x else {
        return Ok(PerformanceCategory::Failed);
    };
    let min = d.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(if x < min {
        PerformanceCategory::Better
    } else if x > max {
        PerformanceCategory::Worse
    } else {
        PerformanceCategory::Mediocre
    })
}

/// Mean-over-tasks bootstrap. Each replicate draws `per_task_draws` values
/// with replacement from every task's list, averages within the task, then
/// across tasks. The point estimate is the same statistic on the full data;
/// the interval is the empirical percentile band of the replicate statistics.
/// Deterministic for a fixed seed.
pub fn bootstrap_ci(
    per_task_values: &BTreeMap<String, Vec<f64>>,
    cfg: &BootstrapConfig,
) -> Result<ConfidenceInterval, MetricsError> {
    cfg.validate()?;
    if per_task_values.is_empty() {
        return Err(MetricsError::EmptyOutcomeSet);
    }
    for (task_id, values) in per_task_values {
        if values.is_empty() {
            return Err(MetricsError::EmptyTaskValues(task_id.clone()));
        }
    }

    // Running means keep constant data exact: the mean of n copies of c is
    // exactly c, so degenerate inputs produce a zero-width interval.
    let point = running_mean(per_task_values.values().map(|v| running_mean(v.iter().copied())));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut stats = Vec::with_capacity(cfg.replicates as usize);
    for _ in 0..cfg.replicates {
        let across = running_mean(per_task_values.values().map(|values| {
            running_mean(
                (0..cfg.per_task_draws).map(|_| values[rng.gen_range(0..values.len())]),
            )
        }));
        stats.push(across);
    }
    stats.sort_by(|a, b| a.partial_cmp(b).expect("finite statistics"));

    let alpha = (1.0 - cfg.confidence) / 2.0;
    Ok(ConfidenceInterval {
        point,
        lo: empirical_percentile(&stats, alpha),
        hi: empirical_percentile(&stats, 1.0 - alpha),
    })
}

/// Incremental mean; exactly reproduces a constant input for any count.
fn running_mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut mean = 0.0;
    let mut count = 0.0;
    for v in values {
        count += 1.0;
        mean += (v - mean) / count;
    }
    mean
}

/// Linear-interpolation percentile of a sorted slice (quantile index
/// `q * (n - 1)`).
fn empirical_percentile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let rank = q.clamp(0.0, 1.0) * (n - 1) as f64;
    let lower = rank.floor() as usize;
    let upper = rank.ceil() as usize;
    if lower == upper {
        sorted[lower]
    } else {
        sorted[lower] + (sorted[upper] - sorted[lower]) * (rank - lower as f64)
    }
}
