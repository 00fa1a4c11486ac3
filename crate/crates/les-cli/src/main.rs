//! Command-line front end: validate scenario files, run single episodes,
//! sweep algorithms over seed sets, and query the exhaustive oracle.
//!
//! Exit codes: 0 success, 1 domain violation (invalid scenario, oversized
//! oracle instance), 2 I/O or usage failure. `CRBPSO_LES_THREADS` caps
//! worker threads (0 or unset = auto).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use les_core::mas;
use les_core::optimizer::{self, AlgoConfig, Algorithm, OptimizationResult};
use les_core::oracle;
use les_core::scenario::{Scenario, ScenarioLoadError};

mod output;
mod sweep;

#[derive(Parser)]
#[command(
    name = "crbpso-les",
    about = "Local energy system scheduling simulator (GA / BPSO / crBPSO)",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario file; print violations or OK.
    Validate { file: PathBuf },
    /// Simulate one day and write episode.jsonl, trace.csv and costs.csv.
    Run {
        file: PathBuf,
        /// unscheduled, ga, bpso or crbpso
        #[arg(long, default_value = "crbpso")]
        algo: Algorithm,
        /// Master seed; defaults to the scenario's seed_default.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
        /// Re-plan before every slot instead of only day-ahead.
        #[arg(long)]
        replan: bool,
    },
    /// Run algorithm x seed cells and summarize them Table-style.
    Sweep {
        file: PathBuf,
        /// Comma-separated subset of unscheduled,ga,bpso,crbpso.
        #[arg(long, value_delimiter = ',', default_values_t = Algorithm::ALL)]
        algos: Vec<Algorithm>,
        /// Either a count N (seeds 1..=N) or a comma-separated seed list.
        #[arg(long, default_value = "30")]
        seeds: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exhaustively solve a tiny scenario and print the optimum as JSON.
    Oracle { file: PathBuf },
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(err.exit_code())
        }
    }
}

/// Error carrying the exit-code contract.
#[derive(Debug)]
struct CliError {
    message: anyhow::Error,
    code: u8,
}

impl CliError {
    fn domain(message: impl Into<anyhow::Error>) -> Self {
        Self {
            message: message.into(),
            code: 1,
        }
    }

    fn io(message: impl Into<anyhow::Error>) -> Self {
        Self {
            message: message.into(),
            code: 2,
        }
    }

    fn exit_code(&self) -> u8 {
        self.code
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.message)
    }
}

fn init_thread_pool() {
    if let Ok(raw) = std::env::var("CRBPSO_LES_THREADS") {
        if let Ok(n) = raw.trim().parse::<usize>() {
            if n > 0 {
                // ignore failure: the pool may already exist in tests
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    Scenario::from_json_file(path).map_err(|err| match err {
        ScenarioLoadError::Io(e) => {
            CliError::io(anyhow::anyhow!("cannot read {}: {e}", path.display()))
        }
        ScenarioLoadError::Json(e) => {
            CliError::io(anyhow::anyhow!("malformed JSON in {}: {e}", path.display()))
        }
        ScenarioLoadError::Invalid(e) => CliError::domain(e),
    })
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Validate { file } => cmd_validate(&file),
        Command::Run {
            file,
            algo,
            seed,
            out,
            replan,
        } => cmd_run(&file, algo, seed, &out, replan),
        Command::Sweep {
            file,
            algos,
            seeds,
            out,
        } => sweep::cmd_sweep(&file, &algos, &seeds, &out),
        Command::Oracle { file } => cmd_oracle(&file),
    }
}

fn cmd_validate(file: &Path) -> Result<(), CliError> {
    load_scenario(file)?;
    println!("OK");
    Ok(())
}

fn cmd_run(
    file: &Path,
    algo: Algorithm,
    seed: Option<u64>,
    out: &Path,
    replan: bool,
) -> Result<(), CliError> {
    let scenario = load_scenario(file)?;
    let cfg = AlgoConfig {
        seed: seed.unwrap_or(scenario.seed_default),
        ..scenario.optimizer
    };
    let log = mas::run_episode(&scenario, algo, &cfg, replan)
        .map_err(|e| CliError::domain(anyhow::anyhow!(e)))?;

    fs::create_dir_all(out).map_err(|e| CliError::io(anyhow::anyhow!(e)))?;
    output::write_episode(out, &log).map_err(CliError::io)?;
    output::write_trace(out, &log.result).map_err(CliError::io)?;
    output::write_costs(out, algo, cfg.seed, &log.breakdown).map_err(CliError::io)?;

    println!(
        "{} seed {} -> objective {:.4} c (delay {:.4}, transaction {:.4}, degradation {:.4}, penalty {:.4}) in {:.2?}",
        algo,
        cfg.seed,
        log.breakdown.objective,
        log.breakdown.delay_cost,
        log.breakdown.transaction_cost,
        log.breakdown.degradation_cost,
        log.breakdown.penalty,
        log.result.wall_time,
    );
    Ok(())
}

fn cmd_oracle(file: &Path) -> Result<(), CliError> {
    let scenario = load_scenario(file)?;
    let (schedule, breakdown) =
        oracle::enumerate_optimum(&scenario).map_err(|e| CliError::domain(anyhow::anyhow!(e)))?;
    let (_, baseline) = oracle::unscheduled_baseline(&scenario);
    let report = serde_json::json!({
        "search_space": oracle::search_space_size(&scenario).to_string(),
        "optimum": breakdown,
        "unscheduled_baseline": baseline,
        "schedule": schedule,
    });
    println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    Ok(())
}

/// Shared helper: one optimizer run plus the grid-trade volumes of its best
/// schedule, in kWh per prosumer over the day.
pub(crate) fn run_cell(
    scenario: &Scenario,
    algo: Algorithm,
    seed: u64,
) -> (OptimizationResult, f64, f64) {
    let cfg = AlgoConfig {
        seed,
        ..scenario.optimizer
    };
    let result = optimizer::run(algo, scenario, &cfg);
    let (_, trace) =
        les_core::costs::evaluate_detailed(&result.best_schedule, scenario).expect("dims match");
    let j = scenario.num_prosumers as f64;
    let buy: f64 = trace
        .dispatches
        .iter()
        .flatten()
        .map(|d| d.grid_buy_total())
        .sum::<f64>()
        / j;
    let sell: f64 = trace
        .dispatches
        .iter()
        .flatten()
        .map(|d| d.grid_sell_energy)
        .sum::<f64>()
        / j;
    (result, buy, sell)
}
