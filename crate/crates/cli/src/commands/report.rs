//! `report`: aggregate stored runs into iteration-indexed curves, emitted as
//! JSON and CSV.

use std::path::Path;

use anyhow::Result;

use perflab_core::report::{iteration_curves, IterationCurve};
use perflab_core::store::read_records;

/// Reads a JSONL run store and writes `curves.json` / `curves.csv` under
/// `out_dir`. An empty store produces an empty report and succeeds.
pub fn cmd_report(records_path: &Path, out_dir: &Path) -> Result<Vec<IterationCurve>> {
    let records = read_records(records_path)?;
    let curves = iteration_curves(&records);

    std::fs::create_dir_all(out_dir)?;
    std::fs::write(
        out_dir.join("curves.json"),
        serde_json::to_string_pretty(&curves)?,
    )?;

    let mut writer = csv::Writer::from_path(out_dir.join("curves.csv"))?;
    writer.write_record(["objective", "iteration", "pass_at_1", "beyond_t", "beyond_m", "beyond_i"])?;
    for curve in &curves {
        for row in &curve.rows {
            writer.write_record([
                curve.objective.to_string(),
                row.iteration.to_string(),
                row.pass_at_1.to_string(),
                row.beyond_t.to_string(),
                row.beyond_m.to_string(),
                row.beyond_i.to_string(),
            ])?;
        }
    }
    writer.flush()?;
    Ok(curves)
}
