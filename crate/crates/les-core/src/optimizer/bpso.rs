//! Binary particle swarm search over schedule bit vectors, in the
//! canonical two-pull form and the crossover-velocity variant.
//!
//! Positions are binary, so the continuous velocity is mapped to bits
//! through the sigmoid transfer: bit ← 1 iff u < 1/(1 + e^{−v}) with u
//! uniform. The crossover variant replaces the summed cognitive+social
//! pull with a Bernoulli choice between them, drawn once per particle per
//! iteration, scaled by `alpha` and added to the previous velocity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::costs::{self, CostBreakdown};
use crate::scenario::Scenario;
use crate::schedule::{ScheduleDims, ScheduleMatrix};

use super::repair::repair;
use super::AlgoConfig;

/// One candidate with its velocity, personal best and private RNG stream.
#[derive(Debug, Clone)]
pub struct Particle {
    pub position: Vec<bool>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<bool>,
    pub best: CostBreakdown,
    rng: ChaCha8Rng,
}

/// Swarm plus the global best found so far. The global best objective is
/// nonincreasing across iterations and never above any personal best.
#[derive(Debug, Clone)]
pub struct SwarmState {
    pub particles: Vec<Particle>,
    pub best_position: Vec<bool>,
    pub best: CostBreakdown,
    pub iteration: usize,
}

/// Which pull the crossover velocity update chose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CrossoverBranch {
    Cognitive,
    Social,
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

fn evaluate_bits(bits: &[bool], scenario: &Scenario, dims: &ScheduleDims) -> CostBreakdown {
    let matrix = ScheduleMatrix::from_bits(bits.to_vec(), dims.clone());
    costs::evaluate(&matrix, scenario).expect("dims derived from the scenario")
}

fn repair_bits(bits: Vec<bool>, scenario: &Scenario, dims: &ScheduleDims) -> Vec<bool> {
    repair(&ScheduleMatrix::from_bits(bits, dims.clone()), scenario).into_bits()
}

/// Spawn a swarm of repaired random candidates with uniform velocities in
/// `[-v_max, v_max]`, evaluate them, and record the initial bests. Each
/// particle owns an RNG stream derived from the master seed, so later
/// updates are reproducible regardless of evaluation parallelism.
pub fn init_population(scenario: &Scenario, cfg: &AlgoConfig, master: &mut ChaCha8Rng) -> SwarmState {
    let dims = ScheduleDims::of(scenario);
    let len = dims.len();
    let seeds: Vec<u64> = (0..cfg.population).map(|_| master.gen()).collect();

    let particles: Vec<Particle> = seeds
        .into_par_iter()
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let raw: Vec<bool> = (0..len).map(|_| rng.gen_bool(0.5)).collect();
            let position = repair_bits(raw, scenario, &dims);
            let velocity: Vec<f64> =
                (0..len).map(|_| rng.gen_range(-cfg.v_max..=cfg.v_max)).collect();
            let best = evaluate_bits(&position, scenario, &dims);
            Particle {
                best_position: position.clone(),
                position,
                velocity,
                best,
                rng,
            }
        })
        .collect();

    let best_idx = argmin(particles.iter().map(|p| p.best.objective));
    let best = particles[best_idx].best;
    let best_position = particles[best_idx].best_position.clone();
    SwarmState {
        particles,
        best_position,
        best,
        iteration: 0,
    }
}

/// Index of the smallest value, first occurrence on ties.
fn argmin(values: impl Iterator<Item = f64>) -> usize {
    let mut best = f64::INFINITY;
    let mut idx = 0;
    for (i, v) in values.enumerate() {
        if v < best {
            best = v;
            idx = i;
        }
    }
    idx
}

/// Projection applied to raw proposed positions before evaluation. The
/// default is the plain repair; re-planning substitutes a variant that
/// also freezes the already-executed prefix.
pub(super) type Projector<'a> = &'a (dyn Fn(Vec<bool>) -> Vec<bool> + Sync);

/// One synchronous swarm iteration: velocity update against the previous
/// global best, sigmoid re-binarization, repair, evaluation, best updates.
pub fn bpso_step(state: &mut SwarmState, scenario: &Scenario, cfg: &AlgoConfig) {
    let dims = ScheduleDims::of(scenario);
    swarm_step(state, scenario, cfg, VelocityRule::TwoPull, &|bits| {
        repair_bits(bits, scenario, &dims)
    });
}

/// One crossover-BPSO iteration: identical to [`bpso_step`] except for the
/// stochastic single-pull velocity update.
pub fn crbpso_step(state: &mut SwarmState, scenario: &Scenario, cfg: &AlgoConfig) {
    let dims = ScheduleDims::of(scenario);
    swarm_step(state, scenario, cfg, VelocityRule::Crossover, &|bits| {
        repair_bits(bits, scenario, &dims)
    });
}

#[derive(Clone, Copy)]
pub(super) enum VelocityRule {
    TwoPull,
    Crossover,
}

pub(super) fn swarm_step(
    state: &mut SwarmState,
    scenario: &Scenario,
    cfg: &AlgoConfig,
    rule: VelocityRule,
    project: Projector<'_>,
) {
    let dims = ScheduleDims::of(scenario);
    let global_best = state.best_position.clone();
    let v_min = -cfg.v_max;

    state.particles.par_iter_mut().for_each(|p| {
        match rule {
            VelocityRule::TwoPull => {
                let r1: f64 = p.rng.gen();
                let r2: f64 = p.rng.gen();
                let targets = p.best_position.iter().zip(&global_best);
                for ((v, &bit), (&local, &global)) in
                    p.velocity.iter_mut().zip(&p.position).zip(targets)
                {
                    let x = bit as u8 as f64;
                    let pull = cfg.alpha_1 * r1 * (local as u8 as f64 - x)
                        + cfg.alpha_2 * r2 * (global as u8 as f64 - x);
                    *v = (*v + pull).clamp(v_min, cfg.v_max);
                }
            }
            VelocityRule::Crossover => {
                let (velocity, _) = crbpso_velocity(
                    &p.velocity,
                    &p.position,
                    &p.best_position,
                    &global_best,
                    cfg,
                    &mut p.rng,
                );
                p.velocity = velocity;
            }
        }

        let proposed: Vec<bool> = p
            .velocity
            .iter()
            .map(|&v| p.rng.gen::<f64>() < sigmoid(v))
            .collect();
        p.position = project(proposed);

        let breakdown = evaluate_bits(&p.position, scenario, &dims);
        if breakdown.objective < p.best.objective {
            p.best = breakdown;
            p.best_position = p.position.clone();
        }
    });

    for p in &state.particles {
        if p.best.objective < state.best.objective {
            state.best = p.best;
            state.best_position = p.best_position.clone();
        }
    }
    state.iteration += 1;
}

/// Crossover velocity update: with probability `p_cr` the pull is toward
/// the particle's own best, otherwise toward the global best; the chosen
/// pull is scaled by `alpha`, added to the previous velocity and clamped.
/// Returns the new velocity and the branch that was drawn.
pub fn crbpso_velocity(
    velocity: &[f64],
    position: &[bool],
    local_best: &[bool],
    global_best: &[bool],
    cfg: &AlgoConfig,
    rng: &mut impl Rng,
) -> (Vec<f64>, CrossoverBranch) {
    let branch = if rng.gen::<f64>() < cfg.p_cr {
        CrossoverBranch::Cognitive
    } else {
        CrossoverBranch::Social
    };
    let target = match branch {
        CrossoverBranch::Cognitive => local_best,
        CrossoverBranch::Social => global_best,
    };
    let r: f64 = rng.gen();
    let v_min = -cfg.v_max;
    let next = velocity
        .iter()
        .zip(position)
        .zip(target)
        .map(|((&v, &x), &t)| {
            let pull = cfg.alpha * r * (t as u8 as f64 - x as u8 as f64);
            (v + pull).clamp(v_min, cfg.v_max)
        })
        .collect();
    (next, branch)
}
