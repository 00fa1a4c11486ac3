//! Per-slot energy dispatch (PV → loads → battery → grid), transaction and
//! degradation cost accounting, delay cost, constraint penalties and the
//! aggregate objective.
//!
//! Dispatch priority in every slot: PV serves the slot's scheduled demand
//! first; residual PV charges the battery; a remaining deficit is served
//! from the battery and then the grid; PV surplus beyond the battery is
//! exported up to the `export_cap` and curtailed past it. Grid-to-battery
//! charging is allowed only in slots whose grid buying price sits at the
//! tariff's daily minimum, where the internal buying price cannot exceed
//! the lowest tier.

use serde::{Deserialize, Serialize};

use crate::model::{self, ModelError};
use crate::pricing::PriceQuote;
use crate::scenario::{LoadSpec, Scenario};
use crate::schedule::ScheduleMatrix;
use crate::storage::{self, EssSpec, EssState};

/// Tolerance used when comparing a grid price against the daily minimum
/// and when sanity-checking quoted prices against the band.
const PRICE_EPS: f64 = 1e-9;

/// Objective weights and the per-slot export cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveWeights {
    /// Cents per unit of average scheduling delay.
    pub w_delay: f64,
    /// Cents per unit of residual constraint violation.
    pub w_penalty: f64,
    /// Max energy sold to the grid per slot, kWh.
    pub export_cap: f64,
}

/// Grid tariff values for one slot, plus whether the slot belongs to the
/// cheapest tariff tier (its buying price equals the daily minimum).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotPrices {
    pub grid_buy: f64,
    pub grid_sell: f64,
    pub cheapest_tier: bool,
}

impl SlotPrices {
    pub fn of(scenario: &Scenario, slot: usize) -> Self {
        let grid_buy = scenario.tariff.grid_buy[slot];
        let min_buy = scenario.tariff.min_buy();
        let max_buy = scenario
            .tariff
            .grid_buy
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        // A flat tariff has no tier structure, hence no cheapest tier.
        let tiered = max_buy > min_buy + PRICE_EPS;
        Self {
            grid_buy,
            grid_sell: scenario.tariff.grid_sell[slot],
            cheapest_tier: tiered && grid_buy <= min_buy + PRICE_EPS,
        }
    }
}

/// Realized energy flows of one prosumer in one slot, kWh, plus the price
/// quote they were settled at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlotDispatch {
    /// PV energy delivered directly to the slot's scheduled loads.
    pub pv_to_loads: f64,
    /// Residual PV charged into the battery.
    pub pv_to_ess: f64,
    /// Battery energy delivered to loads.
    pub ess_discharge: f64,
    /// Grid energy bought to serve loads.
    pub grid_buy_energy: f64,
    /// Grid energy bought to charge the battery (cheapest-tier slots only).
    pub grid_to_ess: f64,
    /// PV surplus sold to the grid, capped at `export_cap`.
    pub grid_sell_energy: f64,
    /// PV surplus beyond battery headroom and the export cap.
    pub pv_curtailed: f64,
    pub quote: PriceQuote,
}

impl SlotDispatch {
    /// Total energy bought from the grid this slot.
    pub fn grid_buy_total(&self) -> f64 {
        self.grid_buy_energy + self.grid_to_ess
    }
}

/// The four objective components and their sum, cents. The sum is stored
/// once at construction so `objective` is bit-identical to re-adding the
/// components in field order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub delay_cost: f64,
    pub transaction_cost: f64,
    pub degradation_cost: f64,
    pub penalty: f64,
    pub objective: f64,
}

impl CostBreakdown {
    pub fn new(delay_cost: f64, transaction_cost: f64, degradation_cost: f64, penalty: f64) -> Self {
        Self {
            delay_cost,
            transaction_cost,
            degradation_cost,
            penalty,
            objective: delay_cost + transaction_cost + degradation_cost + penalty,
        }
    }

    pub const CSV_HEADER: &'static str =
        "algo,seed,delay_cost,transaction_cost,degradation_cost,penalty,objective";

    pub fn csv_row(&self, algo: &str, seed: u64) -> String {
        format!(
            "{algo},{seed},{:.4},{:.4},{:.4},{:.4},{:.4}",
            self.delay_cost, self.transaction_cost, self.degradation_cost, self.penalty, self.objective
        )
    }
}

/// Route one prosumer-slot's energy. The supply/demand ratio is computed
/// from `(pv + discharge headroom)` against the demand before any flow is
/// fixed; all flows are clamped to feasibility, so the step cannot fail.
pub fn dispatch_slot(
    demand: f64,
    pv: f64,
    ess_state: &EssState,
    spec: &EssSpec,
    prices: SlotPrices,
    weights: &ObjectiveWeights,
) -> (SlotDispatch, EssState) {
    debug_assert!(demand >= 0.0 && pv >= 0.0);
    let discharge_head = storage::discharge_headroom(ess_state, spec);
    let quote = PriceQuote::for_slot(prices.grid_buy, prices.grid_sell, pv + discharge_head, demand)
        .expect("nonnegative supply and demand");

    let pv_to_loads = demand.min(pv);
    let deficit = demand - pv_to_loads;
    let pv_residual = pv - pv_to_loads;

    let charge_head = storage::charge_headroom(ess_state, spec);
    let pv_to_ess = pv_residual.min(charge_head);
    let surplus = pv_residual - pv_to_ess;
    let grid_sell_energy = surplus.min(weights.export_cap);
    let pv_curtailed = surplus - grid_sell_energy;

    // In cheapest-tier slots the battery charges from the grid and the
    // deficit is served directly from the grid, never by discharging.
    let (ess_discharge, grid_buy_energy, grid_to_ess) = if prices.cheapest_tier {
        (0.0, deficit, charge_head - pv_to_ess)
    } else {
        let dis = deficit.min(discharge_head);
        (dis, deficit - dis, 0.0)
    };

    let charge_in = pv_to_ess + grid_to_ess;
    let next = storage::step_ess(ess_state, charge_in, ess_discharge, spec)
        .expect("flows clamped within headroom");

    (
        SlotDispatch {
            pv_to_loads,
            pv_to_ess,
            ess_discharge,
            grid_buy_energy,
            grid_to_ess,
            grid_sell_energy,
            pv_curtailed,
            quote,
        },
        next,
    )
}

/// Net transaction cost over a horizon of dispatches, cents: grid
/// purchases minus sell-back revenue, divided by the number of prosumers.
/// Purchases are priced at the internal selling price and sales at the
/// internal buying price; `swap_prices` flips that convention.
pub fn transaction_cost(dispatches: &[SlotDispatch], num_prosumers: usize, swap_prices: bool) -> f64 {
    let mut buy_cost = 0.0;
    let mut sell_revenue = 0.0;
    for d in dispatches {
        let (buy_price, sell_price) = if swap_prices {
            (d.quote.internal_buy, d.quote.internal_sell)
        } else {
            (d.quote.internal_sell, d.quote.internal_buy)
        };
        buy_cost += buy_price * d.grid_buy_total();
        sell_revenue += sell_price * d.grid_sell_energy;
    }
    (buy_cost - sell_revenue) / num_prosumers as f64
}

/// Delay cost in cents: linear in the average delay.
pub fn delay_cost(avg_delay: f64, weights: &ObjectiveWeights) -> f64 {
    debug_assert!(avg_delay >= 0.0);
    weights.w_delay * avg_delay
}

/// Everything the per-slot pipeline produced for one candidate, for
/// logging and invariant checks.
#[derive(Debug, Clone)]
pub struct EvaluationTrace {
    /// `[home][slot]` realized flows.
    pub dispatches: Vec<Vec<SlotDispatch>>,
    /// `[home][slot]` battery level after each slot.
    pub ess_levels: Vec<Vec<f64>>,
    /// `[home][slot]` post-step event flags.
    pub ess_states: Vec<Vec<EssState>>,
    /// Per-slot transaction cost, cents, already normalized by J.
    pub slot_transaction: Vec<f64>,
    /// Per-slot degradation cost, cents, already normalized by J.
    pub slot_degradation: Vec<f64>,
}

/// Evaluate a candidate schedule: run the per-slot dispatch pipeline for
/// every home, price the transactions, and assemble the objective.
pub fn evaluate(candidate: &ScheduleMatrix, scenario: &Scenario) -> Result<CostBreakdown, ModelError> {
    evaluate_detailed(candidate, scenario).map(|(breakdown, _)| breakdown)
}

/// [`evaluate`], also returning the full trace.
pub fn evaluate_detailed(
    candidate: &ScheduleMatrix,
    scenario: &Scenario,
) -> Result<(CostBreakdown, EvaluationTrace), ModelError> {
    if !candidate.matches(scenario) {
        return Err(ModelError::DimensionMismatch);
    }
    let horizon = scenario.horizon;
    let num_homes = scenario.num_homes();
    let j = scenario.num_prosumers as f64;
    let pv_series = scenario.pv_series();
    let slot_prices: Vec<SlotPrices> = (0..horizon).map(|t| SlotPrices::of(scenario, t)).collect();

    let mut dispatches: Vec<Vec<SlotDispatch>> = Vec::with_capacity(num_homes);
    let mut ess_levels: Vec<Vec<f64>> = Vec::with_capacity(num_homes);
    let mut ess_states: Vec<Vec<EssState>> = Vec::with_capacity(num_homes);
    let mut degradation_per_home: Vec<Vec<f64>> = Vec::with_capacity(num_homes);

    for (b, home) in scenario.homes.iter().enumerate() {
        let mut state = scenario.ess.initial_state();
        let mut home_dispatches = Vec::with_capacity(horizon);
        let mut levels = Vec::with_capacity(horizon);
        let mut states = Vec::with_capacity(horizon);
        let mut degradation = Vec::with_capacity(horizon);
        for t in 0..horizon {
            let mut demand = 0.0;
            for (l, load) in home.loads.iter().enumerate() {
                if candidate.get(b, l, t) {
                    demand += load.packet_energy;
                }
            }
            let (dispatch, next) = dispatch_slot(
                demand,
                pv_series[t],
                &state,
                &scenario.ess,
                slot_prices[t],
                &scenario.weights,
            );
            state = next;
            degradation.push(storage::slot_degradation(&state, &scenario.ess));
            levels.push(state.level);
            states.push(state);
            home_dispatches.push(dispatch);
        }
        dispatches.push(home_dispatches);
        ess_levels.push(levels);
        ess_states.push(states);
        degradation_per_home.push(degradation);
    }

    // Delay and residual violations per load.
    let mut delay_sum = 0.0;
    let mut violation_units = 0.0;
    for (b, home) in scenario.homes.iter().enumerate() {
        for (l, load) in home.loads.iter().enumerate() {
            let stripe = candidate.stripe(b, l);
            let (delay, violations) = stripe_delay_and_violations(load, stripe);
            delay_sum += delay;
            violation_units += violations;
        }
    }
    let avg_delay = delay_sum / j;

    // Residual price-band breaches (zero by construction of the pricing
    // curves; kept in the penalty so a regression would be priced, not
    // silently accepted).
    for home in &dispatches {
        for (t, d) in home.iter().enumerate() {
            let band_hi = scenario.tariff.grid_buy[t] + PRICE_EPS;
            let band_lo = scenario.tariff.grid_sell[t] - PRICE_EPS;
            violation_units += (d.quote.internal_buy - band_hi).max(0.0);
            violation_units += (d.quote.internal_sell - band_hi).max(0.0);
            violation_units += (band_lo - d.quote.internal_buy).max(0.0);
            violation_units += (band_lo - d.quote.internal_sell).max(0.0);
        }
    }

    let flat: Vec<SlotDispatch> = dispatches.iter().flatten().copied().collect();
    let transaction = transaction_cost(&flat, scenario.num_prosumers, scenario.swap_transaction_prices);
    let degradation = storage::average_degradation(&degradation_per_home, scenario.num_prosumers);
    let delay = delay_cost(avg_delay, &scenario.weights);
    let penalty = scenario.weights.w_penalty * violation_units;

    let mut slot_transaction = vec![0.0; horizon];
    let mut slot_degradation = vec![0.0; horizon];
    for b in 0..num_homes {
        for t in 0..horizon {
            let d = &dispatches[b][t];
            let (buy_price, sell_price) = if scenario.swap_transaction_prices {
                (d.quote.internal_buy, d.quote.internal_sell)
            } else {
                (d.quote.internal_sell, d.quote.internal_buy)
            };
            slot_transaction[t] +=
                (buy_price * d.grid_buy_total() - sell_price * d.grid_sell_energy) / j;
            slot_degradation[t] += degradation_per_home[b][t] / j;
        }
    }

    Ok((
        CostBreakdown::new(delay, transaction, degradation, penalty),
        EvaluationTrace {
            dispatches,
            ess_levels,
            ess_states,
            slot_transaction,
            slot_degradation,
        },
    ))
}

/// Delay contribution and violation units of one load's stripe. The start
/// used for the delay is the first set bit clamped into the start window;
/// violation units count out-of-window bits plus the packet-count
/// mismatch, both zero for repaired candidates.
fn stripe_delay_and_violations(load: &LoadSpec, stripe: &[bool]) -> (f64, f64) {
    let window = load.feasible_window();
    let total = stripe.iter().filter(|&&b| b).count();
    let outside = stripe
        .iter()
        .enumerate()
        .filter(|&(t, &b)| b && !window.contains(&t))
        .count();
    let violations = outside as f64 + (total as f64 - load.packets_required as f64).abs();

    let delay = match stripe.iter().position(|&b| b) {
        Some(first) => {
            let start = first.clamp(load.request_slot, load.latest_start);
            model::load_delay(load, start).expect("clamped start in window")
        }
        None => 0.0,
    };
    (delay, violations)
}
