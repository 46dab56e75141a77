//! Aggregates stored runs into iteration-indexed curves: Pass@1 and
//! Beyond-{T,M,I} of the incumbent as the loop progresses, one curve set per
//! objective.

use serde::{Deserialize, Serialize};

use crate::metrics::percentile_rank;
use crate::store::RunRecord;
use crate::task::{objective_metric, EfficiencyObjective, PerformanceRecord};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub iteration: u32,
    pub pass_at_1: f64,
    pub beyond_t: f64,
    pub beyond_m: f64,
    pub beyond_i: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationCurve {
    pub objective: EfficiencyObjective,
    pub task_count: usize,
    pub rows: Vec<CurveRow>,
}

/// The incumbent standing after processing all trace entries up to and
/// including `iteration`; records whose traces start later have no
/// established incumbent yet and count as failed.
fn incumbent_at(record: &RunRecord, iteration: u32) -> Option<&PerformanceRecord> {
    record
        .traces
        .iter()
        .rev()
        .find(|t| t.iteration <= iteration)
        .map(|t| &t.best_record_after)
}

/// Builds per-objective curves from raw run records. A failed (or not yet
/// established) incumbent contributes zero to every Beyond average, and a
/// record without reference distributions ranks as zero as well.
pub fn iteration_curves(records: &[RunRecord]) -> Vec<IterationCurve> {
    let mut curves = Vec::new();
    for objective in EfficiencyObjective::ALL {
        let group: Vec<&RunRecord> = records.iter().filter(|r| r.objective == objective).collect();
        if group.is_empty() {
            continue;
        }
        let mut iterations: Vec<u32> = group
            .iter()
            .flat_map(|r| r.traces.iter().map(|t| t.iteration))
            .collect();
        iterations.sort_unstable();
        iterations.dedup();

        let n = group.len() as f64;
        let rows = iterations
            .into_iter()
            .map(|iteration| {
                let mut passed = 0usize;
                let mut sums = [0.0f64; 3];
                for record in &group {
                    let Some(incumbent) = incumbent_at(record, iteration) else {
                        continue;
                    };
                    if incumbent.passed {
                        passed += 1;
                    }
                    let Some(dists) = &record.reference_distributions else {
                        continue;
                    };
                    for (slot, dim) in EfficiencyObjective::ALL.iter().enumerate() {
                        if let Some(value) = objective_metric(incumbent, *dim) {
                            sums[slot] +=
                                percentile_rank(value, dists.for_objective(*dim)).unwrap_or(0.0);
                        }
                    }
                }
                CurveRow {
                    iteration,
                    pass_at_1: passed as f64 / n,
                    beyond_t: sums[0] / n,
                    beyond_m: sums[1] / n,
                    beyond_i: sums[2] / n,
                }
            })
            .collect();

        curves.push(IterationCurve {
            objective,
            task_count: group.len(),
            rows,
        });
    }
    curves
}
