//! Supply/demand-ratio (SDR) pricing for prosumer–ESP–grid transactions.
//!
//! In every slot the energy service provider quotes an internal buying and
//! selling price to the prosumers, interpolated between the grid tariff
//! band `[grid_sell, grid_buy]` by the local supply/demand ratio `R`:
//!
//! * `R = 0` (no local supply): both prices sit at `grid_buy` — all energy
//!   is procured from the grid.
//! * `R >= 1` (surplus): both prices collapse to `grid_sell` — excess
//!   energy is sold back to the grid.
//! * `0 < R < 1`: the internal sell price follows the hyperbolic SDR curve
//!   `sell·buy / ((buy − sell)·R + sell)` and the internal buy price blends
//!   it with the grid price, `sell_price(R)·R + buy·(1 − R)`.
//!
//! The same prices are sometimes written as a single expression composed of
//! Heaviside indicators, e.g.
//! `Υ_buy = Υ_sell·R²·H²(1−R) + ζ_sell·(1−H(R−1)) + ζ_buy·(1−R)·H(R)·H(1−R)`.
//! Evaluated at `R = 0` that composition yields `ζ_sell + ζ_buy` instead of
//! `ζ_buy`, contradicting the intended boundary behaviour under either
//! `H(0)` convention, so this module implements the case-wise semantics
//! directly; [`heaviside`] is provided for callers that want the indicator
//! form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PricingError {
    #[error("supply must be nonnegative, got {0}")]
    NegativeSupply(f64),
    #[error("demand must be nonnegative, got {0}")]
    NegativeDemand(f64),
}

/// Per-slot grid tariff band in cents/kWh. Invariant (checked during
/// scenario validation): `0 < grid_sell[t] < grid_buy[t]` for every slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridTariff {
    pub grid_buy: Vec<f64>,
    pub grid_sell: Vec<f64>,
}

impl GridTariff {
    /// Cheapest grid buying price over the horizon. Slots quoted at this
    /// price form the "cheapest tier" in which grid-to-battery charging is
    /// allowed by the dispatch policy.
    pub fn min_buy(&self) -> f64 {
        self.grid_buy.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Internal prices quoted for one slot, plus the ratio that produced them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceQuote {
    pub internal_buy: f64,
    pub internal_sell: f64,
    pub ratio: f64,
}

impl PriceQuote {
    /// Quote for a slot with the given tariff band and pre-flow supply and
    /// demand. A slot with neither supply nor demand gets the inert quote
    /// `(grid_buy, grid_sell)`: no transaction can occur against it.
    pub fn for_slot(
        grid_buy: f64,
        grid_sell: f64,
        supply: f64,
        demand: f64,
    ) -> Result<Self, PricingError> {
        let ratio = supply_demand_ratio(supply, demand)?;
        if supply == 0.0 && demand == 0.0 {
            return Ok(Self {
                internal_buy: grid_buy,
                internal_sell: grid_sell,
                ratio,
            });
        }
        Ok(Self {
            internal_buy: internal_buy_price(grid_buy, grid_sell, ratio),
            internal_sell: internal_sell_price(grid_buy, grid_sell, ratio),
            ratio,
        })
    }
}

/// Right-continuous Heaviside step: 1 for `x >= 0`, else 0. The `H(0) = 1`
/// convention puts the `R = 1` boundary into the surplus regime.
pub fn heaviside(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Local supply divided by demand. A slot with demand 0 but positive supply
/// returns `+inf`, which every consumer treats as the `R >= 1` surplus
/// branch; a slot with neither returns 0.
pub fn supply_demand_ratio(supply: f64, demand: f64) -> Result<f64, PricingError> {
    if supply < 0.0 {
        return Err(PricingError::NegativeSupply(supply));
    }
    if demand < 0.0 {
        return Err(PricingError::NegativeDemand(demand));
    }
    if demand == 0.0 {
        if supply > 0.0 {
            return Ok(f64::INFINITY);
        }
        return Ok(0.0);
    }
    Ok(supply / demand)
}

/// Internal selling price for ratio `r`, continuous and nonincreasing on
/// `[0, 1]`: equals `grid_buy` at `r = 0` and `grid_sell` for `r >= 1`.
pub fn internal_sell_price(grid_buy: f64, grid_sell: f64, r: f64) -> f64 {
    debug_assert!(r >= 0.0);
    if r >= 1.0 {
        return grid_sell;
    }
    grid_sell * grid_buy / ((grid_buy - grid_sell) * r + grid_sell)
}

/// Internal buying price for ratio `r`: `grid_buy` at `r = 0`, the blend
/// `sell_price(r)·r + grid_buy·(1 − r)` on `(0, 1)`, and `grid_sell` for
/// `r >= 1`. Always at or above [`internal_sell_price`] for the same `r`.
pub fn internal_buy_price(grid_buy: f64, grid_sell: f64, r: f64) -> f64 {
    debug_assert!(r >= 0.0);
    if r >= 1.0 {
        return grid_sell;
    }
    if r == 0.0 {
        return grid_buy;
    }
    internal_sell_price(grid_buy, grid_sell, r) * r + grid_buy * (1.0 - r)
}
