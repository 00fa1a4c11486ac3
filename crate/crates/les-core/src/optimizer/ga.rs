//! Baseline genetic algorithm over schedule bit vectors: binary tournament
//! selection, uniform crossover, bit-flip mutation, elitism of one. All
//! stochastic choices draw from the master stream in a fixed order, so a
//! generation is reproducible no matter how evaluation is parallelized.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::costs::{self, CostBreakdown};
use crate::scenario::Scenario;
use crate::schedule::{ScheduleDims, ScheduleMatrix};

use super::repair::repair;
use super::AlgoConfig;

#[derive(Debug, Clone)]
pub struct Individual {
    pub genome: Vec<bool>,
    pub breakdown: CostBreakdown,
}

impl Individual {
    pub fn objective(&self) -> f64 {
        self.breakdown.objective
    }
}

fn evaluate_genome(genome: &[bool], scenario: &Scenario, dims: &ScheduleDims) -> CostBreakdown {
    let matrix = ScheduleMatrix::from_bits(genome.to_vec(), dims.clone());
    costs::evaluate(&matrix, scenario).expect("dims derived from the scenario")
}

/// Random repaired population, evaluated.
pub fn ga_init(scenario: &Scenario, cfg: &AlgoConfig, master: &mut ChaCha8Rng) -> Vec<Individual> {
    let dims = ScheduleDims::of(scenario);
    let len = dims.len();
    let genomes: Vec<Vec<bool>> = (0..cfg.population)
        .map(|_| {
            let raw: Vec<bool> = (0..len).map(|_| master.gen_bool(0.5)).collect();
            repair(&ScheduleMatrix::from_bits(raw, dims.clone()), scenario).into_bits()
        })
        .collect();
    genomes
        .into_par_iter()
        .map(|genome| {
            let breakdown = evaluate_genome(&genome, scenario, &dims);
            Individual { genome, breakdown }
        })
        .collect()
}

/// Index of the fittest individual, first on ties.
pub fn best_index(population: &[Individual]) -> usize {
    let mut best = f64::INFINITY;
    let mut idx = 0;
    for (i, ind) in population.iter().enumerate() {
        if ind.objective() < best {
            best = ind.objective();
            idx = i;
        }
    }
    idx
}

fn tournament(population: &[Individual], rng: &mut ChaCha8Rng) -> usize {
    let a = rng.gen_range(0..population.len());
    let b = rng.gen_range(0..population.len());
    if population[b].objective() < population[a].objective() {
        b
    } else {
        a
    }
}

/// Advance the population one generation. The incumbent best survives
/// unchanged, so the best objective is nonincreasing.
pub fn ga_step(
    population: &mut Vec<Individual>,
    scenario: &Scenario,
    cfg: &AlgoConfig,
    master: &mut ChaCha8Rng,
) {
    let dims = ScheduleDims::of(scenario);
    ga_step_projected(population, scenario, cfg, master, &|bits| {
        repair(&ScheduleMatrix::from_bits(bits, dims.clone()), scenario).into_bits()
    });
}

/// [`ga_step`] with a custom feasibility projection (re-planning).
pub(super) fn ga_step_projected(
    population: &mut Vec<Individual>,
    scenario: &Scenario,
    cfg: &AlgoConfig,
    master: &mut ChaCha8Rng,
    project: super::bpso::Projector<'_>,
) {
    let dims = ScheduleDims::of(scenario);
    let len = dims.len();
    let mutation_rate = cfg
        .ga_mutation_rate
        .unwrap_or_else(|| 1.0 / len.max(1) as f64);

    let elite = population[best_index(population)].clone();
    let mut offspring_genomes: Vec<Vec<bool>> = Vec::with_capacity(population.len());

    while offspring_genomes.len() + 1 < population.len() {
        let pa = tournament(population, master);
        let pb = tournament(population, master);
        let (mut child_a, mut child_b) = (
            population[pa].genome.clone(),
            population[pb].genome.clone(),
        );
        if master.gen::<f64>() < cfg.ga_crossover_rate {
            for i in 0..len {
                if master.gen_bool(0.5) {
                    std::mem::swap(&mut child_a[i], &mut child_b[i]);
                }
            }
        }
        for child in [&mut child_a, &mut child_b] {
            for bit in child.iter_mut() {
                if master.gen::<f64>() < mutation_rate {
                    *bit = !*bit;
                }
            }
        }
        offspring_genomes.push(child_a);
        if offspring_genomes.len() + 1 < population.len() {
            offspring_genomes.push(child_b);
        }
    }

    let mut next: Vec<Individual> = offspring_genomes
        .into_par_iter()
        .map(|raw| {
            let genome = project(raw);
            let breakdown = evaluate_genome(&genome, scenario, &dims);
            Individual { genome, breakdown }
        })
        .collect();
    next.push(elite);
    *population = next;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::SeedableRng;

    fn cfg(seed: u64) -> AlgoConfig {
        AlgoConfig {
            population: 10,
            seed,
            ..AlgoConfig::default()
        }
    }

    #[test]
    fn elite_survives_every_generation() {
        let scn = fixtures::tiny_scenario(0);
        let c = cfg(5);
        let mut master = ChaCha8Rng::seed_from_u64(c.seed);
        let mut pop = ga_init(&scn, &c, &mut master);
        let mut best = pop[best_index(&pop)].objective();
        for _ in 0..15 {
            ga_step(&mut pop, &scn, &c, &mut master);
            let now = pop[best_index(&pop)].objective();
            assert!(now <= best, "elitism must keep the best");
            best = now;
        }
    }

    #[test]
    fn identity_step_without_variation_operators() {
        let scn = fixtures::tiny_scenario(1);
        let mut c = cfg(6);
        c.ga_crossover_rate = 0.0;
        c.ga_mutation_rate = Some(0.0);
        let mut master = ChaCha8Rng::seed_from_u64(c.seed);
        let mut pop = ga_init(&scn, &c, &mut master);
        let original: Vec<f64> = pop.iter().map(|i| i.objective()).collect();
        let best_before = pop[best_index(&pop)].objective();
        ga_step(&mut pop, &scn, &c, &mut master);
        // every offspring is a verbatim clone of some parent
        for ind in &pop {
            assert!(
                original.iter().any(|&o| o == ind.objective()),
                "objective {} not present in the parent generation",
                ind.objective()
            );
        }
        assert_eq!(pop[best_index(&pop)].objective(), best_before);
    }

    #[test]
    fn offspring_are_feasible() {
        let scn = fixtures::tiny_scenario(2);
        let c = cfg(8);
        let mut master = ChaCha8Rng::seed_from_u64(c.seed);
        let mut pop = ga_init(&scn, &c, &mut master);
        ga_step(&mut pop, &scn, &c, &mut master);
        for ind in &pop {
            let m = ScheduleMatrix::from_bits(ind.genome.clone(), ScheduleDims::of(&scn));
            for (b, home) in scn.homes.iter().enumerate() {
                for (l, load) in home.loads.iter().enumerate() {
                    assert_eq!(m.packets_scheduled(b, l), load.packets_required);
                }
            }
        }
    }
}
