//! File writers for episode runs. Output is byte-deterministic: fixed
//! field orders, shortest-round-trip float formatting from serde/Display,
//! and four decimal places where the cost CSV contract fixes them.

use std::fs;
use std::path::Path;

use les_core::costs::CostBreakdown;
use les_core::mas::EpisodeLog;
use les_core::optimizer::{Algorithm, OptimizationResult};

pub fn write_episode(dir: &Path, log: &EpisodeLog) -> anyhow::Result<()> {
    fs::write(dir.join("episode.jsonl"), log.to_jsonl())?;
    Ok(())
}

pub fn write_trace(dir: &Path, result: &OptimizationResult) -> anyhow::Result<()> {
    let mut text = String::from("iteration,best_objective\n");
    for (i, best) in result.trace.iter().enumerate() {
        text.push_str(&format!("{i},{best}\n"));
    }
    fs::write(dir.join("trace.csv"), text)?;
    Ok(())
}

pub fn write_costs(
    dir: &Path,
    algo: Algorithm,
    seed: u64,
    breakdown: &CostBreakdown,
) -> anyhow::Result<()> {
    let text = format!(
        "{}\n{}\n",
        CostBreakdown::CSV_HEADER,
        breakdown.csv_row(algo.name(), seed)
    );
    fs::write(dir.join("costs.csv"), text)?;
    Ok(())
}
