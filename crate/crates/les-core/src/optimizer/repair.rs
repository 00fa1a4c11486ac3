//! Repair operator: projects an arbitrary bit vector onto the feasible
//! set — exact per-load packet counts, every bit inside its load's window.
//!
//! Deterministic by construction: deficits are filled at the earliest free
//! in-window slots, surpluses removed from the latest set slots, and a
//! contiguous load keeps the run start implied by its first set bit. The
//! operator is idempotent and leaves feasible inputs untouched.

use crate::scenario::{LoadSpec, Scenario};
use crate::schedule::ScheduleMatrix;

/// Repair every load stripe of `candidate` to feasibility.
pub fn repair(candidate: &ScheduleMatrix, scenario: &Scenario) -> ScheduleMatrix {
    repair_from(candidate, scenario, 0)
}

/// Repair only slots at or after `from_slot`, treating earlier bits as
/// already-delivered history. Packets delivered in the frozen prefix count
/// toward each load's requirement; the remainder is placed in the part of
/// the window that is still ahead. Used by re-planning, where the past is
/// immutable. With `from_slot = 0` this is the plain repair.
pub fn repair_from(
    candidate: &ScheduleMatrix,
    scenario: &Scenario,
    from_slot: usize,
) -> ScheduleMatrix {
    let mut repaired = candidate.clone();
    for (b, home) in scenario.homes.iter().enumerate() {
        for (l, load) in home.loads.iter().enumerate() {
            let stripe = repaired.stripe_mut(b, l);
            if load.contiguous {
                repair_contiguous(stripe, load, from_slot);
            } else {
                repair_scattered(stripe, load, from_slot);
            }
        }
    }
    repaired
}

fn repair_contiguous(stripe: &mut [bool], load: &LoadSpec, from_slot: usize) {
    let n = load.packets_required;
    let started = stripe[..from_slot.min(stripe.len())]
        .iter()
        .position(|&b| b);

    if let Some(start) = started {
        // Run already underway: keep the prefix as-is and force the
        // remaining consecutive slots, nothing else, in the future part.
        let run_end = (start + n).min(stripe.len());
        for (t, bit) in stripe.iter_mut().enumerate().skip(from_slot) {
            *bit = t < run_end;
        }
        return;
    }

    // Not started: pick the start from the first future set bit, clamped
    // into the still-admissible start window, defaulting to its beginning.
    let earliest = load.request_slot.max(from_slot).min(load.latest_start);
    let start = stripe[from_slot..]
        .iter()
        .position(|&b| b)
        .map(|off| (from_slot + off).clamp(earliest, load.latest_start))
        .unwrap_or(earliest);
    let run_end = (start + n).min(stripe.len());
    for (t, bit) in stripe.iter_mut().enumerate().skip(from_slot) {
        *bit = t >= start && t < run_end;
    }
}

fn repair_scattered(stripe: &mut [bool], load: &LoadSpec, from_slot: usize) {
    let n = load.packets_required;
    let delivered = stripe[..from_slot.min(stripe.len())]
        .iter()
        .filter(|&&b| b)
        .count();
    let remaining = n.saturating_sub(delivered);

    let window_start = load.request_slot.max(from_slot);
    let window_end = load.latest_start; // inclusive

    // Clear future bits outside the window.
    for (t, bit) in stripe.iter_mut().enumerate().skip(from_slot) {
        if t < window_start || t > window_end {
            *bit = false;
        }
    }

    let count = |stripe: &[bool]| {
        stripe
            .iter()
            .enumerate()
            .skip(window_start)
            .take_while(|&(t, _)| t <= window_end)
            .filter(|&(_, &b)| b)
            .count()
    };

    let mut set = count(stripe);
    // Surplus: drop the latest set slots first.
    if set > remaining {
        for t in (window_start..=window_end).rev() {
            if set == remaining {
                break;
            }
            if stripe[t] {
                stripe[t] = false;
                set -= 1;
            }
        }
    }
    // Deficit: fill the earliest free slots. If the remaining window is too
    // small (possible only for inconsistent prefixes handed to
    // re-planning), the shortfall is left for the penalty term to price.
    if set < remaining {
        for t in window_start..=window_end.min(stripe.len().saturating_sub(1)) {
            if set == remaining {
                break;
            }
            if !stripe[t] {
                stripe[t] = true;
                set += 1;
            }
        }
    }
}
