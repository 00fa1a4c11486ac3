//! Ground-truth engines: exhaustive enumeration of the global optimum for
//! tiny scenarios, and the unscheduled (requested-time) baseline.
//!
//! The enumeration is deliberately naive — it walks every window-feasible,
//! packet-conserving schedule in lexicographic placement order and keeps
//! the argmin, breaking objective ties toward the lexicographically
//! smallest flattened bit vector so reruns and re-scans agree bit for bit.

use thiserror::Error;

use crate::costs::{self, CostBreakdown};
use crate::optimizer::repair;
use crate::scenario::{LoadSpec, Scenario};
use crate::schedule::{ScheduleDims, ScheduleMatrix};

/// Enumeration refuses scenarios whose feasible-placement count exceeds
/// this bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TinyScenarioBound {
    pub max_search_space: u128,
}

impl Default for TinyScenarioBound {
    fn default() -> Self {
        Self {
            max_search_space: 1 << 20,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("search space of {estimated} feasible schedules exceeds the bound {bound}")]
    SearchSpaceTooLarge { estimated: u128, bound: u128 },
}

/// Number of window-feasible, packet-conserving schedules of a scenario.
/// Contiguous loads contribute one placement per admissible start; the
/// others contribute one per packet-slot combination.
pub fn search_space_size(scenario: &Scenario) -> u128 {
    let mut total: u128 = 1;
    for home in &scenario.homes {
        for load in &home.loads {
            total = total.saturating_mul(load_placement_count(load));
        }
    }
    total
}

fn load_placement_count(load: &LoadSpec) -> u128 {
    let width = load.start_window_len() as u128;
    if load.contiguous {
        width
    } else {
        binomial(width, load.packets_required as u128)
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// All slot-sets a load may occupy, in lexicographic order.
fn load_placements(load: &LoadSpec) -> Vec<Vec<usize>> {
    let window: Vec<usize> = (load.request_slot..=load.latest_start).collect();
    if load.contiguous {
        window
            .iter()
            .map(|&start| (start..start + load.packets_required).collect())
            .collect()
    } else {
        combinations(&window, load.packets_required)
    }
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k == 0 {
        return vec![Vec::new()];
    }
    if k > items.len() {
        return out;
    }
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // advance the combination counter
        let mut pos = k;
        while pos > 0 {
            pos -= 1;
            if idx[pos] != pos + items.len() - k {
                idx[pos] += 1;
                for later in pos + 1..k {
                    idx[later] = idx[later - 1] + 1;
                }
                break;
            }
            if pos == 0 {
                return out;
            }
        }
    }
}

/// Globally optimal schedule and cost under the default search-space bound.
pub fn enumerate_optimum(scenario: &Scenario) -> Result<(ScheduleMatrix, CostBreakdown), OracleError> {
    enumerate_optimum_bounded(scenario, TinyScenarioBound::default())
}

/// Globally optimal schedule and cost, refusing search spaces above the
/// bound with the estimated size.
pub fn enumerate_optimum_bounded(
    scenario: &Scenario,
    bound: TinyScenarioBound,
) -> Result<(ScheduleMatrix, CostBreakdown), OracleError> {
    let estimated = search_space_size(scenario);
    if estimated > bound.max_search_space {
        return Err(OracleError::SearchSpaceTooLarge {
            estimated,
            bound: bound.max_search_space,
        });
    }

    let dims = ScheduleDims::of(scenario);
    let mut placements: Vec<(usize, usize, Vec<Vec<usize>>)> = Vec::new();
    for (b, home) in scenario.homes.iter().enumerate() {
        for (l, load) in home.loads.iter().enumerate() {
            placements.push((b, l, load_placements(load)));
        }
    }

    let mut best: Option<(ScheduleMatrix, CostBreakdown)> = None;
    let mut counters = vec![0usize; placements.len()];
    loop {
        let mut candidate = ScheduleMatrix::zeros(scenario);
        for ((b, l, options), &pick) in placements.iter().zip(&counters) {
            for &slot in &options[pick] {
                candidate.set(*b, *l, slot, true);
            }
        }
        let breakdown = costs::evaluate(&candidate, scenario).expect("dims match");
        let replace = match &best {
            None => true,
            Some((incumbent, current)) => {
                breakdown.objective < current.objective
                    || (breakdown.objective == current.objective && candidate < *incumbent)
            }
        };
        if replace {
            best = Some((candidate, breakdown));
        }

        // mixed-radix increment over per-load placement indices
        let mut pos = placements.len();
        loop {
            if pos == 0 {
                let _ = dims;
                return Ok(best.expect("at least one candidate enumerated"));
            }
            pos -= 1;
            counters[pos] += 1;
            if counters[pos] < placements[pos].2.len() {
                break;
            }
            counters[pos] = 0;
        }
    }
}

/// Baseline: every load served starting at its request slot, evaluated
/// through the standard pipeline.
pub fn unscheduled_baseline(scenario: &Scenario) -> (ScheduleMatrix, CostBreakdown) {
    let schedule = repair(&ScheduleMatrix::zeros(scenario), scenario);
    let breakdown = costs::evaluate(&schedule, scenario).expect("dims match");
    (schedule, breakdown)
}
