//! Population-based schedule optimizers: GA, canonical BPSO and the
//! crossover-velocity BPSO variant, plus the unscheduled pass-through.
//!
//! Every run is a pure function of (scenario, config, seed): per-particle
//! RNG streams are derived from the master seed so fitness evaluation may
//! be parallelized without changing the result, the recorded best-objective
//! trace never increases, and every candidate that is ever evaluated has
//! been through [`repair`] first.

mod bpso;
mod ga;
mod repair;

pub use bpso::{
    bpso_step, crbpso_step, crbpso_velocity, init_population, CrossoverBranch, Particle,
    SwarmState,
};
pub use ga::{best_index, ga_init, ga_step, Individual};
pub use repair::{repair, repair_from};

use bpso::{swarm_step, VelocityRule};
use ga::ga_step_projected;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::costs::{self, CostBreakdown};
use crate::scenario::Scenario;
use crate::schedule::{ScheduleDims, ScheduleMatrix};

/// Search algorithm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Unscheduled,
    Ga,
    Bpso,
    CrBpso,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Unscheduled,
        Algorithm::Ga,
        Algorithm::Bpso,
        Algorithm::CrBpso,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Unscheduled => "unscheduled",
            Algorithm::Ga => "ga",
            Algorithm::Bpso => "bpso",
            Algorithm::CrBpso => "crbpso",
        }
    }

    /// Whether the algorithm actually searches (and is therefore seeded).
    pub fn is_stochastic(&self) -> bool {
        !matches!(self, Algorithm::Unscheduled)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "unscheduled" => Ok(Algorithm::Unscheduled),
            "ga" => Ok(Algorithm::Ga),
            "bpso" => Ok(Algorithm::Bpso),
            "crbpso" => Ok(Algorithm::CrBpso),
            other => Err(format!(
                "unknown algorithm `{other}` (expected unscheduled, ga, bpso or crbpso)"
            )),
        }
    }
}

/// Search parameters shared by all three algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgoConfig {
    pub population: usize,
    pub iterations: usize,
    /// Cognitive pull coefficient of the two-pull velocity update.
    pub alpha_1: f64,
    /// Social pull coefficient of the two-pull velocity update.
    pub alpha_2: f64,
    /// Scale of the crossover velocity term.
    pub alpha: f64,
    /// Probability that the crossover pull is cognitive rather than social.
    pub p_cr: f64,
    pub v_max: f64,
    pub ga_crossover_rate: f64,
    /// Per-bit flip probability; `None` means `1 / genome length`.
    pub ga_mutation_rate: Option<f64>,
    /// Stop after this many consecutive iterations without improvement.
    pub stagnation: usize,
    pub seed: u64,
}

impl Default for AlgoConfig {
    fn default() -> Self {
        Self {
            population: 50,
            iterations: 200,
            alpha_1: 2.0,
            alpha_2: 2.0,
            alpha: 1.0,
            p_cr: 0.5,
            v_max: 4.0,
            ga_crossover_rate: 0.9,
            ga_mutation_rate: None,
            stagnation: 50,
            seed: crate::scenario::DEFAULT_SEED,
        }
    }
}

impl AlgoConfig {
    pub fn v_min(&self) -> f64 {
        -self.v_max
    }
}

/// Outcome of one optimizer run.
#[derive(Debug, Clone, Serialize)]
pub struct OptimizationResult {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub best_schedule: ScheduleMatrix,
    pub best: CostBreakdown,
    /// Best objective after initialization and after each iteration;
    /// monotone nonincreasing. A single entry for `unscheduled`.
    pub trace: Vec<f64>,
    pub iterations_run: usize,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Run the selected algorithm to its iteration budget or stagnation stop.
/// `unscheduled` evaluates the requested-time baseline without searching.
pub fn run(algorithm: Algorithm, scenario: &Scenario, cfg: &AlgoConfig) -> OptimizationResult {
    run_from(algorithm, scenario, cfg, None, 0)
}

/// [`run`] with an optional warm-start candidate and a frozen prefix of
/// already-executed slots (used by per-slot re-planning). The incumbent,
/// when given, joins the initial population after repair.
pub fn run_from(
    algorithm: Algorithm,
    scenario: &Scenario,
    cfg: &AlgoConfig,
    incumbent: Option<&ScheduleMatrix>,
    from_slot: usize,
) -> OptimizationResult {
    let started = Instant::now();
    let dims = ScheduleDims::of(scenario);
    let reproject = |bits: Vec<bool>| -> Vec<bool> {
        let m = ScheduleMatrix::from_bits(bits, dims.clone());
        let base = match incumbent {
            Some(fixed) => merge_prefix(fixed, &m, from_slot),
            None => m,
        };
        repair_from(&base, scenario, from_slot).into_bits()
    };

    match algorithm {
        Algorithm::Unscheduled => {
            let schedule = match incumbent {
                Some(fixed) => repair_from(fixed, scenario, from_slot),
                None => repair(&ScheduleMatrix::zeros(scenario), scenario),
            };
            let best = costs::evaluate(&schedule, scenario).expect("dims match");
            OptimizationResult {
                algorithm,
                seed: cfg.seed,
                best_schedule: schedule,
                best,
                trace: vec![best.objective],
                iterations_run: 0,
                wall_time: started.elapsed(),
            }
        }
        Algorithm::Bpso | Algorithm::CrBpso => {
            let mut master = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut swarm = init_population_with(scenario, cfg, &mut master, &reproject, incumbent);
            let mut trace = vec![swarm.best.objective];
            let mut stagnant = 0usize;
            let rule = match algorithm {
                Algorithm::Bpso => VelocityRule::TwoPull,
                _ => VelocityRule::Crossover,
            };
            for _ in 0..cfg.iterations {
                let before = swarm.best.objective;
                swarm_step(&mut swarm, scenario, cfg, rule, &reproject);
                trace.push(swarm.best.objective);
                stagnant = if swarm.best.objective < before { 0 } else { stagnant + 1 };
                if stagnant >= cfg.stagnation {
                    break;
                }
            }
            OptimizationResult {
                algorithm,
                seed: cfg.seed,
                best_schedule: ScheduleMatrix::from_bits(swarm.best_position.clone(), dims),
                best: swarm.best,
                iterations_run: trace.len() - 1,
                trace,
                wall_time: started.elapsed(),
            }
        }
        Algorithm::Ga => {
            let mut master = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut population = ga_init_with(scenario, cfg, &mut master, &reproject, incumbent);
            let mut best = population[best_index(&population)].clone();
            let mut trace = vec![best.objective()];
            let mut stagnant = 0usize;
            for _ in 0..cfg.iterations {
                ga_step_projected(&mut population, scenario, cfg, &mut master, &reproject);
                let gen_best = &population[best_index(&population)];
                if gen_best.objective() < best.objective() {
                    best = gen_best.clone();
                    stagnant = 0;
                } else {
                    stagnant += 1;
                }
                trace.push(best.objective());
                if stagnant >= cfg.stagnation {
                    break;
                }
            }
            OptimizationResult {
                algorithm,
                seed: cfg.seed,
                best_schedule: ScheduleMatrix::from_bits(best.genome.clone(), dims),
                best: best.breakdown,
                iterations_run: trace.len() - 1,
                trace,
                wall_time: started.elapsed(),
            }
        }
    }
}

/// Overwrite the first `from_slot` slots of `candidate` with the frozen
/// history from `fixed`.
fn merge_prefix(fixed: &ScheduleMatrix, candidate: &ScheduleMatrix, from_slot: usize) -> ScheduleMatrix {
    let mut merged = candidate.clone();
    let dims = merged.dims().clone();
    for b in 0..dims.num_homes() {
        for l in 0..dims.num_loads(b) {
            for t in 0..from_slot.min(dims.horizon()) {
                merged.set(b, l, t, fixed.get(b, l, t));
            }
        }
    }
    merged
}

// The plain entry points in `bpso`/`ga` repair against the whole horizon;
// these wrappers swap in the re-planning projection and optionally seed the
// population with the incumbent plan.

fn init_population_with(
    scenario: &Scenario,
    cfg: &AlgoConfig,
    master: &mut ChaCha8Rng,
    reproject: &(dyn Fn(Vec<bool>) -> Vec<bool> + Sync),
    incumbent: Option<&ScheduleMatrix>,
) -> SwarmState {
    let mut swarm = init_population(scenario, cfg, master);
    reproject_swarm(&mut swarm, scenario, reproject, incumbent);
    swarm
}

fn reproject_swarm(
    swarm: &mut SwarmState,
    scenario: &Scenario,
    reproject: &(dyn Fn(Vec<bool>) -> Vec<bool> + Sync),
    incumbent: Option<&ScheduleMatrix>,
) {
    let dims = ScheduleDims::of(scenario);
    if incumbent.is_none() {
        return; // positions are already repaired full-horizon candidates
    }
    for (i, p) in swarm.particles.iter_mut().enumerate() {
        let mut bits = std::mem::take(&mut p.position);
        if i == 0 {
            if let Some(fixed) = incumbent {
                bits = fixed.as_bits().to_vec();
            }
        }
        p.position = reproject(bits);
        p.best_position = p.position.clone();
        p.best = costs::evaluate(
            &ScheduleMatrix::from_bits(p.position.clone(), dims.clone()),
            scenario,
        )
        .expect("dims match");
    }
    let idx = {
        let mut best = f64::INFINITY;
        let mut idx = 0;
        for (i, p) in swarm.particles.iter().enumerate() {
            if p.best.objective < best {
                best = p.best.objective;
                idx = i;
            }
        }
        idx
    };
    swarm.best = swarm.particles[idx].best;
    swarm.best_position = swarm.particles[idx].best_position.clone();
}

fn ga_init_with(
    scenario: &Scenario,
    cfg: &AlgoConfig,
    master: &mut ChaCha8Rng,
    reproject: &(dyn Fn(Vec<bool>) -> Vec<bool> + Sync),
    incumbent: Option<&ScheduleMatrix>,
) -> Vec<Individual> {
    let dims = ScheduleDims::of(scenario);
    let mut population = ga_init(scenario, cfg, master);
    if incumbent.is_some() {
        for (i, ind) in population.iter_mut().enumerate() {
            let mut bits = std::mem::take(&mut ind.genome);
            if i == 0 {
                if let Some(fixed) = incumbent {
                    bits = fixed.as_bits().to_vec();
                }
            }
            ind.genome = reproject(bits);
            ind.breakdown = costs::evaluate(
                &ScheduleMatrix::from_bits(ind.genome.clone(), dims.clone()),
                scenario,
            )
            .expect("dims match");
        }
    }
    population
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn traces_are_monotone_for_all_algorithms() {
        let scn = fixtures::tiny_scenario(0);
        let cfg = AlgoConfig {
            population: 10,
            iterations: 30,
            seed: 11,
            ..AlgoConfig::default()
        };
        for algo in [Algorithm::Ga, Algorithm::Bpso, Algorithm::CrBpso] {
            let result = run(algo, &scn, &cfg);
            for pair in result.trace.windows(2) {
                assert!(pair[1] <= pair[0], "{algo} trace increased");
            }
        }
    }

    #[test]
    fn identical_seeds_give_identical_results() {
        let scn = fixtures::tiny_scenario(1);
        let cfg = AlgoConfig {
            population: 12,
            iterations: 20,
            seed: 77,
            ..AlgoConfig::default()
        };
        for algo in Algorithm::ALL {
            let a = run(algo, &scn, &cfg);
            let b = run(algo, &scn, &cfg);
            assert_eq!(a.best_schedule, b.best_schedule, "{algo}");
            assert_eq!(a.best, b.best, "{algo}");
            assert_eq!(a.trace, b.trace, "{algo}");
        }
    }

    #[test]
    fn unscheduled_has_single_trace_entry_and_zero_delay() {
        let scn = fixtures::default_scenario();
        let result = run(Algorithm::Unscheduled, &scn, &AlgoConfig::default());
        assert_eq!(result.trace.len(), 1);
        assert_eq!(result.best.delay_cost, 0.0);
        assert_eq!(result.best.penalty, 0.0);
    }

    #[test]
    fn stagnation_cuts_the_run_short() {
        let scn = fixtures::tiny_scenario(0);
        let cfg = AlgoConfig {
            population: 10,
            iterations: 500,
            stagnation: 10,
            seed: 3,
            ..AlgoConfig::default()
        };
        let result = run(Algorithm::CrBpso, &scn, &cfg);
        assert!(result.iterations_run < 500);
    }

    #[test]
    fn algorithm_parses_from_str() {
        assert_eq!("crbpso".parse::<Algorithm>().unwrap(), Algorithm::CrBpso);
        assert_eq!("GA".parse::<Algorithm>().unwrap(), Algorithm::Ga);
        assert!("simplex".parse::<Algorithm>().is_err());
    }
}
