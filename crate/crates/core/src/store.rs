//! Append-only persistence of optimization runs as JSONL, one record per
//! line. Records are immutable once written; reruns append.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::optimizer::IterationTrace;
use crate::reward::RewardBreakdown;
use crate::task::{EfficiencyObjective, PerformanceRecord, ReferenceDistributions};

/// Everything persisted for one task's optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub timestamp: DateTime<Utc>,
    pub task_id: String,
    pub objective: EfficiencyObjective,
    pub traces: Vec<IterationTrace>,
    pub final_code: String,
    /// Re-measured winner (evaluation-protocol repeats), not the single
    /// in-loop measurement.
    pub final_record: PerformanceRecord,
    /// One breakdown per trace entry.
    pub rewards: Vec<RewardBreakdown>,
    /// Snapshot of the run configuration.
    pub config: serde_json::Value,
    /// Copied from the task so reports are self-contained.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reference_distributions: Option<ReferenceDistributions>,
}

/// JSON keys stripped (recursively) before comparing reruns: wall-clock
/// identities and raw measurements are expected to differ between otherwise
/// identical runs.
pub const DETERMINISM_MASK: &[&str] = &[
    "run_id",
    "timestamp",
    "time_s",
    "peak_memory_kb",
    "integral_kb_s",
    "samples",
    "rewards",
];

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("cannot access run store: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed record at line {line}: {message}")]
    MalformedRecord { line: usize, message: String },
}

static RUN_COUNTER: AtomicU64 = AtomicU64::new(0);

/// A process-unique run id carrying the task id for readability.
pub fn new_run_id(task_id: &str) -> String {
    let nonce = RUN_COUNTER.fetch_add(1, Ordering::Relaxed);
    format!("{task_id}-{}-{nonce}", Utc::now().timestamp_millis())
}

/// Appends records to a JSONL file, creating it if needed. Existing lines
/// are never rewritten.
pub fn append_records(path: impl AsRef<Path>, records: &[RunRecord]) -> Result<(), StoreError> {
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    for record in records {
        let line = serde_json::to_string(record).expect("record serializes");
        writeln!(file, "{line}")?;
    }
    file.flush()?;
    Ok(())
}

/// Reads every record from a JSONL file; blank lines are skipped.
pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<RunRecord>, StoreError> {
    let file = std::fs::File::open(path)?;
    let mut records = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| StoreError::MalformedRecord {
            line: idx + 1,
            message: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}

/// The record as JSON with every masked key removed, for rerun comparisons.
pub fn masked_value(record: &RunRecord) -> serde_json::Value {
    let mut value = serde_json::to_value(record).expect("record serializes");
    strip_masked_keys(&mut value);
    value
}

fn strip_masked_keys(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Object(map) => {
            map.retain(|key, _| !DETERMINISM_MASK.contains(&key.as_str()));
            for child in map.values_mut() {
                strip_masked_keys(child);
            }
        }
        serde_json::Value::Array(items) => {
            for child in items {
                strip_masked_keys(child);
            }
        }
        _ => {}
    }
}
