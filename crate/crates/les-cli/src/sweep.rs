//! Multi-seed, multi-algorithm sweeps and the Table-style summary report.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use les_core::costs::CostBreakdown;
use les_core::optimizer::Algorithm;

use crate::{load_scenario, run_cell, CliError};

pub const SUMMARY_HEADER: &str =
    "algo,mean_buy_kwh,mean_sell_kwh,daily_bill_usd,monthly_bill_usd,mean_objective,std_objective";

struct Cell {
    algo: Algorithm,
    seed: u64,
    breakdown: CostBreakdown,
    buy_kwh: f64,
    sell_kwh: f64,
}

/// A summary row aggregated over one algorithm's seeds.
pub struct SummaryRow {
    pub algo: Algorithm,
    pub mean_buy_kwh: f64,
    pub mean_sell_kwh: f64,
    /// Mean transaction cost in dollars; negative is net revenue.
    pub daily_bill_usd: f64,
    pub monthly_bill_usd: f64,
    pub mean_objective: f64,
    pub std_objective: f64,
}

impl SummaryRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}",
            self.algo,
            self.mean_buy_kwh,
            self.mean_sell_kwh,
            self.daily_bill_usd,
            self.monthly_bill_usd,
            self.mean_objective,
            self.std_objective
        )
    }
}

/// Parse `--seeds`: a bare count N means seeds 1..=N, otherwise a
/// comma-separated explicit list.
pub fn parse_seeds(spec: &str) -> Result<Vec<u64>, String> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err("at least one seed is required".into());
    }
    if !spec.contains(',') {
        let n: u64 = spec
            .parse()
            .map_err(|_| format!("`{spec}` is neither a count nor a seed list"))?;
        if n == 0 {
            return Err("seed count must be ≥ 1".into());
        }
        return Ok((1..=n).collect());
    }
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| format!("invalid seed `{s}`"))
        })
        .collect()
}

pub fn cmd_sweep(
    file: &Path,
    algos: &[Algorithm],
    seeds_spec: &str,
    out: &Path,
) -> Result<(), CliError> {
    let scenario = load_scenario(file)?;
    let seeds = parse_seeds(seeds_spec).map_err(|e| CliError::domain(anyhow::anyhow!(e)))?;
    if algos.is_empty() {
        return Err(CliError::domain(anyhow::anyhow!(
            "at least one algorithm is required"
        )));
    }
    // fixed report order, independent of the order given on the command line
    let mut algos: Vec<Algorithm> = Algorithm::ALL
        .into_iter()
        .filter(|a| algos.contains(a))
        .collect();
    algos.dedup();

    let jobs: Vec<(Algorithm, u64)> = algos
        .iter()
        .flat_map(|&algo| seeds.iter().map(move |&seed| (algo, seed)))
        .collect();
    let cells: Vec<Cell> = jobs
        .into_par_iter()
        .map(|(algo, seed)| {
            let (result, buy_kwh, sell_kwh) = run_cell(&scenario, algo, seed);
            Cell {
                algo,
                seed,
                breakdown: result.best,
                buy_kwh,
                sell_kwh,
            }
        })
        .collect();

    let rows = summarize(&algos, &cells);

    fs::create_dir_all(out).map_err(|e| CliError::io(anyhow::anyhow!(e)))?;
    let mut summary = String::from(SUMMARY_HEADER);
    summary.push('\n');
    for row in &rows {
        summary.push_str(&row.csv_row());
        summary.push('\n');
    }
    fs::write(out.join("summary.csv"), &summary).map_err(|e| CliError::io(anyhow::anyhow!(e)))?;

    let mut runs = String::from(CostBreakdown::CSV_HEADER);
    runs.push('\n');
    for cell in &cells {
        runs.push_str(&cell.breakdown.csv_row(cell.algo.name(), cell.seed));
        runs.push('\n');
    }
    fs::write(out.join("runs.csv"), &runs).map_err(|e| CliError::io(anyhow::anyhow!(e)))?;

    print!("{summary}");
    print_improvements(&rows);
    Ok(())
}

fn summarize(algos: &[Algorithm], cells: &[Cell]) -> Vec<SummaryRow> {
    algos
        .iter()
        .map(|&algo| {
            let group: Vec<&Cell> = cells.iter().filter(|c| c.algo == algo).collect();
            let n = group.len() as f64;
            let mean = |f: &dyn Fn(&Cell) -> f64| group.iter().map(|c| f(c)).sum::<f64>() / n;
            let mean_objective = mean(&|c| c.breakdown.objective);
            let variance = group
                .iter()
                .map(|c| (c.breakdown.objective - mean_objective).powi(2))
                .sum::<f64>()
                / n;
            let daily_bill_usd = mean(&|c| c.breakdown.transaction_cost) / 100.0;
            SummaryRow {
                algo,
                mean_buy_kwh: mean(&|c| c.buy_kwh),
                mean_sell_kwh: mean(&|c| c.sell_kwh),
                daily_bill_usd,
                monthly_bill_usd: 30.0 * daily_bill_usd,
                mean_objective,
                std_objective: variance.sqrt(),
            }
        })
        .collect()
}

/// Report the mean-objective improvement of crbpso over the other search
/// algorithms present in the sweep.
fn print_improvements(rows: &[SummaryRow]) {
    let Some(cr) = rows.iter().find(|r| r.algo == Algorithm::CrBpso) else {
        return;
    };
    for reference in [Algorithm::Unscheduled, Algorithm::Ga, Algorithm::Bpso] {
        if let Some(other) = rows.iter().find(|r| r.algo == reference) {
            let improvement =
                100.0 * (other.mean_objective - cr.mean_objective) / other.mean_objective.abs();
            println!("crbpso improves on {reference} by {improvement:.2}% mean objective");
        }
    }
}
