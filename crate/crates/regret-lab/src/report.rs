//! CSV emission for regret experiments.

use std::io::Write;
use std::path::Path;

use crate::runner::MeasuredRegret;
use crate::LabError;

pub const REGRET_CSV_HEADER: &[&str] = &[
    "problem_id",
    "strategy",
    "seed",
    "t",
    "mean_value",
    "ci_low",
    "ci_high",
    "simple_regret",
    "cumulative_regret",
];

/// Serializes one aggregated point per row, carrying the exact strategy
/// spec string and seed so any row is independently re-runnable.
pub fn write_regret_csv<W: Write>(out: W, results: &[MeasuredRegret]) -> Result<(), LabError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(REGRET_CSV_HEADER)?;
    for result in results {
        for point in &result.aggregated {
            writer.write_record(&[
                result.problem_id.clone(),
                result.strategy.clone(),
                result.base_seed.to_string(),
                point.t.to_string(),
                format!("{:.6}", point.mean_value),
                format!("{:.6}", point.ci_low),
                format!("{:.6}", point.ci_high),
                format!("{:.6}", point.mean_simple_regret),
                format!("{:.6}", point.mean_cumulative_regret),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}

pub fn write_regret_csv_file(path: &Path, results: &[MeasuredRegret]) -> Result<(), LabError> {
    let file = std::fs::File::create(path)?;
    write_regret_csv(file, results)
}
