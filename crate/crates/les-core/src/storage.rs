//! Battery state evolution, charge/discharge event flags and degradation
//! cost bookkeeping.
//!
//! One slot of storage dynamics is `level' = decay·level + charge_eff·in −
//! discharge_eff·out`, clamped to `[floor, capacity]`. The `out` argument is
//! the energy delivered to loads; the cell drains `discharge_eff·out`, which
//! keeps the slot energy balance in terms of delivered kWh (see the dispatch
//! pipeline in [`crate::costs`]).

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for headroom checks, absorbing float dust from clamped
/// dispatch arithmetic.
const FLOW_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum StorageError {
    #[error("charge and discharge requested in the same slot ({charge} kWh in, {discharge} kWh out)")]
    SimultaneousChargeDischarge { charge: f64, discharge: f64 },
    #[error("charge {requested} kWh exceeds headroom {headroom} kWh")]
    ChargeExceedsHeadroom { requested: f64, headroom: f64 },
    #[error("discharge {requested} kWh exceeds headroom {headroom} kWh")]
    DischargeExceedsHeadroom { requested: f64, headroom: f64 },
    #[error("flows must be nonnegative (charge {charge}, discharge {discharge})")]
    NegativeFlow { charge: f64, discharge: f64 },
}

/// Static battery parameters. Energies kWh, event costs cents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EssSpec {
    /// Usable upper bound on the stored level.
    pub capacity: f64,
    /// Lower bound the level never drops below.
    pub floor: f64,
    /// Fraction of the stored level carried into the next slot.
    pub decay: f64,
    pub charge_eff: f64,
    pub discharge_eff: f64,
    /// Max energy accepted from sources in one slot.
    pub max_charge_rate: f64,
    /// Max energy delivered to loads in one slot.
    pub max_discharge_rate: f64,
    /// Degradation cost booked per charging event.
    pub kappa_charge: f64,
    /// Degradation cost booked per discharging event.
    pub kappa_discharge: f64,
    pub initial_level: f64,
}

impl EssSpec {
    pub fn initial_state(&self) -> EssState {
        EssState {
            level: self.initial_level,
            charged: false,
            discharged: false,
        }
    }
}

/// Battery level after a slot step plus the event flags for that slot.
/// `charged` and `discharged` are never both set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EssState {
    pub level: f64,
    pub charged: bool,
    pub discharged: bool,
}

/// Energy the battery can accept this slot: `min(max_charge_rate,
/// capacity − level)`.
pub fn charge_headroom(state: &EssState, spec: &EssSpec) -> f64 {
    spec.max_charge_rate.min(spec.capacity - state.level).max(0.0)
}

/// Energy the battery can deliver this slot: `min(max_discharge_rate,
/// level − floor)`.
pub fn discharge_headroom(state: &EssState, spec: &EssSpec) -> f64 {
    spec.max_discharge_rate.min(state.level - spec.floor).max(0.0)
}

/// Advance the battery by one slot. `charge_in` is energy drawn from
/// sources (PV or grid), `discharge_out` is energy delivered to loads; at
/// most one of them may be positive and each must fit its headroom.
pub fn step_ess(
    state: &EssState,
    charge_in: f64,
    discharge_out: f64,
    spec: &EssSpec,
) -> Result<EssState, StorageError> {
    if charge_in < 0.0 || discharge_out < 0.0 {
        return Err(StorageError::NegativeFlow {
            charge: charge_in,
            discharge: discharge_out,
        });
    }
    if charge_in > 0.0 && discharge_out > 0.0 {
        return Err(StorageError::SimultaneousChargeDischarge {
            charge: charge_in,
            discharge: discharge_out,
        });
    }
    let headroom = charge_headroom(state, spec);
    if charge_in > headroom + FLOW_EPS {
        return Err(StorageError::ChargeExceedsHeadroom {
            requested: charge_in,
            headroom,
        });
    }
    let headroom = discharge_headroom(state, spec);
    if discharge_out > headroom + FLOW_EPS {
        return Err(StorageError::DischargeExceedsHeadroom {
            requested: discharge_out,
            headroom,
        });
    }
    let raw = spec.decay * state.level + spec.charge_eff * charge_in
        - spec.discharge_eff * discharge_out;
    Ok(EssState {
        level: raw.clamp(spec.floor, spec.capacity),
        charged: charge_in > 0.0,
        discharged: discharge_out > 0.0,
    })
}

/// Degradation booked for the slot that produced `state`: the per-event
/// cost of whichever event occurred, 0 when idle.
pub fn slot_degradation(state: &EssState, spec: &EssSpec) -> f64 {
    let mut cost = 0.0;
    if state.charged {
        cost += spec.kappa_charge;
    }
    if state.discharged {
        cost += spec.kappa_discharge;
    }
    cost
}

/// Average aggregated degradation: per-home per-slot costs summed and
/// divided by the number of prosumers.
pub fn average_degradation(trajectories: &[Vec<f64>], num_prosumers: usize) -> f64 {
    let total: f64 = trajectories.iter().flatten().sum();
    total / num_prosumers as f64
}
