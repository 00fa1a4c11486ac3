//! Packet-demand aggregation, scheduling-delay computation and the PV
//! production model.

use thiserror::Error;

use crate::scenario::{LoadSpec, PvSpec, Scenario};
use crate::schedule::ScheduleMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("schedule dimensions do not match the scenario")]
    DimensionMismatch,
    #[error("infeasible schedule: {0}")]
    InfeasibleSchedule(String),
    #[error("actual start {actual} outside window [{earliest}, {latest}]")]
    StartOutsideWindow {
        actual: usize,
        earliest: usize,
        latest: usize,
    },
}

/// PV energy harvested in one slot, kWh: `efficiency · area · irradiance ·
/// (1 − 0.005·(temp − 25)) · slot_duration`, clamped to `[0, max_output]`.
pub fn pv_output(pv: &PvSpec, irradiance: f64, outdoor_temp: f64, slot_duration: f64) -> f64 {
    debug_assert!(irradiance >= 0.0);
    let correction = 1.0 - 0.005 * (outdoor_temp - 25.0);
    let raw = pv.efficiency * pv.area * irradiance * correction * slot_duration;
    raw.clamp(0.0, pv.max_output)
}

/// Total scheduled energy over all homes, loads and slots, kWh. Equals the
/// total requested energy whenever packet conservation holds.
pub fn total_demand(schedule: &ScheduleMatrix, scenario: &Scenario) -> Result<f64, ModelError> {
    if !schedule.matches(scenario) {
        return Err(ModelError::DimensionMismatch);
    }
    let mut sum = 0.0;
    for (b, home) in scenario.homes.iter().enumerate() {
        for (l, load) in home.loads.iter().enumerate() {
            sum += schedule.packets_scheduled(b, l) as f64 * load.packet_energy;
        }
    }
    Ok(sum)
}

/// Normalized start delay of one load: 0 when served at its request slot,
/// 1 at the latest admissible start, linear in between. A zero-width window
/// has no scheduling freedom and yields 0.
pub fn load_delay(load: &LoadSpec, actual_start: usize) -> Result<f64, ModelError> {
    if actual_start < load.request_slot || actual_start > load.latest_start {
        return Err(ModelError::StartOutsideWindow {
            actual: actual_start,
            earliest: load.request_slot,
            latest: load.latest_start,
        });
    }
    let width = load.latest_start - load.request_slot;
    if width == 0 {
        return Ok(0.0);
    }
    Ok((actual_start - load.request_slot) as f64 / width as f64)
}

/// Sum of per-load start delays divided by the number of prosumers.
pub fn average_delay(schedule: &ScheduleMatrix, scenario: &Scenario) -> Result<f64, ModelError> {
    if !schedule.matches(scenario) {
        return Err(ModelError::DimensionMismatch);
    }
    let mut sum = 0.0;
    for (b, home) in scenario.homes.iter().enumerate() {
        for (l, load) in home.loads.iter().enumerate() {
            let start = schedule.actual_start(b, l).ok_or_else(|| {
                ModelError::InfeasibleSchedule(format!(
                    "homes[{b}].loads[{l}] has no scheduled packets"
                ))
            })?;
            sum += load_delay(load, start)?;
        }
    }
    Ok(sum / scenario.num_prosumers as f64)
}

/// Harvested PV energy over the horizon, summed across homes and divided
/// by the number of prosumers, kWh.
pub fn average_pv(scenario: &Scenario) -> f64 {
    let per_home: f64 = scenario.pv_series().iter().sum();
    per_home * scenario.num_homes() as f64 / scenario.num_prosumers as f64
}
