//! Scenario data model: homes, quantized loads, PV, battery, tariff,
//! weather, objective weights and optimizer defaults, plus JSON loading
//! and validation.
//!
//! Loading is two-stage: a [`RawScenario`] mirrors the JSON file with every
//! field optional, and [`validate_scenario`] checks invariants, fills
//! defaults and produces an immutable [`Scenario`]. Malformed JSON is an
//! I/O-level failure; a missing or out-of-range field is a domain violation
//! reported by name, with all violations collected in one pass.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::costs::ObjectiveWeights;
use crate::optimizer::AlgoConfig;
use crate::pricing::GridTariff;
use crate::storage::EssSpec;

pub const DEFAULT_HORIZON: usize = 24;
pub const DEFAULT_SLOT_DURATION: f64 = 1.0;
pub const DEFAULT_PACKET_QUANTUM: f64 = 0.5;
pub const DEFAULT_SEED: u64 = 42;

/// Validation failure: every violated invariant, named after the offending
/// field.
#[derive(Debug, Error)]
pub struct ScenarioError {
    pub violations: Vec<String>,
}

impl std::fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "invalid scenario:")?;
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

/// One schedulable load: `packets_required` energy packets of
/// `packet_energy` kWh each, placeable from `request_slot` with the last
/// admissible start `latest_start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadSpec {
    pub packets_required: usize,
    pub packet_energy: f64,
    pub request_slot: usize,
    pub latest_start: usize,
    pub max_delay: usize,
    pub contiguous: bool,
}

impl LoadSpec {
    /// Slots a packet of this load may occupy. Non-contiguous loads place
    /// each packet independently inside `[request_slot, latest_start]`;
    /// a contiguous load starts anywhere in that range and runs for
    /// `packets_required` consecutive slots, so its occupancy window
    /// extends to `latest_start + packets_required - 1`.
    pub fn feasible_window(&self) -> std::ops::RangeInclusive<usize> {
        if self.contiguous {
            self.request_slot..=self.latest_start + self.packets_required - 1
        } else {
            self.request_slot..=self.latest_start
        }
    }

    /// Width of the start window `[request_slot, latest_start]`.
    pub fn start_window_len(&self) -> usize {
        self.latest_start - self.request_slot + 1
    }
}

/// Rooftop PV array: output is `efficiency · area · irradiance ·
/// (1 − 0.005·(temp − 25))` per hour, clamped to `[0, max_output]` per slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvSpec {
    pub efficiency: f64,
    pub area: f64,
    pub max_output: f64,
}

/// Per-slot irradiance (kW/m²) and outdoor temperature (°C) series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeatherSeries {
    pub irradiance: Vec<f64>,
    pub outdoor_temp: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomeProfile {
    pub loads: Vec<LoadSpec>,
}

/// Validated, immutable description of one local energy system instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub horizon: usize,
    pub slot_duration: f64,
    pub packet_quantum: f64,
    /// Normalization divisor for the averaged cost terms; defaults to the
    /// number of homes.
    pub num_prosumers: usize,
    pub homes: Vec<HomeProfile>,
    pub pv: PvSpec,
    pub ess: EssSpec,
    pub tariff: GridTariff,
    pub weather: WeatherSeries,
    pub weights: ObjectiveWeights,
    pub seed_default: u64,
    /// Price the grid-buy volume at the internal buying price and the sell
    /// volume at the internal selling price, instead of the default
    /// cross-priced convention. See [`crate::costs::transaction_cost`].
    pub swap_transaction_prices: bool,
    pub optimizer: AlgoConfig,
}

impl Scenario {
    pub fn num_homes(&self) -> usize {
        self.homes.len()
    }

    pub fn load(&self, home: usize, load: usize) -> &LoadSpec {
        &self.homes[home].loads[load]
    }

    /// Per-slot PV output of one home in kWh (identical across homes since
    /// the PV spec and weather are system-wide).
    pub fn pv_series(&self) -> Vec<f64> {
        (0..self.horizon)
            .map(|t| {
                crate::model::pv_output(
                    &self.pv,
                    self.weather.irradiance[t],
                    self.weather.outdoor_temp[t],
                    self.slot_duration,
                )
            })
            .collect()
    }

    pub fn from_json_str(text: &str) -> Result<Self, ScenarioLoadError> {
        let raw: RawScenario = serde_json::from_str(text)?;
        Ok(validate_scenario(raw)?)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self, ScenarioLoadError> {
        let text = fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialization cannot fail")
    }
}

/// Loading failure: I/O and JSON syntax errors are distinct from domain
/// violations so callers can map them to different exit codes.
#[derive(Debug, Error)]
pub enum ScenarioLoadError {
    #[error("cannot read scenario file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed scenario JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] ScenarioError),
}

// ---------------------------------------------------------------------------
// Raw (pre-validation) mirror of the scenario file.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Default, Deserialize)]
pub struct RawScenario {
    pub horizon: Option<usize>,
    pub slot_duration: Option<f64>,
    pub packet_quantum: Option<f64>,
    pub num_prosumers: Option<usize>,
    pub homes: Option<Vec<RawHome>>,
    pub pv: Option<RawPv>,
    pub ess: Option<RawEss>,
    pub tariff: Option<RawTariff>,
    pub weather: Option<RawWeather>,
    pub weights: Option<RawWeights>,
    pub seed_default: Option<u64>,
    pub swap_transaction_prices: Option<bool>,
    pub optimizer: Option<RawAlgoConfig>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RawHome {
    pub loads: Option<Vec<RawLoad>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RawLoad {
    pub packets_required: Option<usize>,
    pub packet_energy: Option<f64>,
    pub request_slot: Option<usize>,
    pub latest_start: Option<usize>,
    pub max_delay: Option<usize>,
    pub contiguous: Option<bool>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RawPv {
    pub efficiency: Option<f64>,
    pub area: Option<f64>,
    pub max_output: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RawEss {
    pub capacity: Option<f64>,
    pub floor: Option<f64>,
    pub decay: Option<f64>,
    pub charge_eff: Option<f64>,
    pub discharge_eff: Option<f64>,
    pub max_charge_rate: Option<f64>,
    pub max_discharge_rate: Option<f64>,
    pub kappa_charge: Option<f64>,
    pub kappa_discharge: Option<f64>,
    pub initial_level: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RawTariff {
    pub grid_buy: Option<Vec<f64>>,
    pub grid_sell: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RawWeather {
    pub irradiance: Option<Vec<f64>>,
    pub outdoor_temp: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RawWeights {
    pub w_delay: Option<f64>,
    pub w_penalty: Option<f64>,
    pub export_cap: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct RawAlgoConfig {
    pub population: Option<usize>,
    pub iterations: Option<usize>,
    pub alpha_1: Option<f64>,
    pub alpha_2: Option<f64>,
    pub alpha: Option<f64>,
    pub p_cr: Option<f64>,
    pub v_max: Option<f64>,
    pub ga_crossover_rate: Option<f64>,
    pub ga_mutation_rate: Option<f64>,
    pub stagnation: Option<usize>,
    pub seed: Option<u64>,
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Checker {
    violations: Vec<String>,
}

impl Checker {
    fn new() -> Self {
        Self {
            violations: Vec::new(),
        }
    }

    fn require<T>(&mut self, value: Option<T>, field: &str) -> Option<T> {
        if value.is_none() {
            self.violations.push(format!("missing field `{field}`"));
        }
        value
    }

    fn check(&mut self, ok: bool, message: impl Into<String>) {
        if !ok {
            self.violations.push(message.into());
        }
    }
}

/// Check every invariant of a raw scenario, fill defaults and return the
/// validated form, or the full list of violations.
pub fn validate_scenario(raw: RawScenario) -> Result<Scenario, ScenarioError> {
    let mut c = Checker::new();

    let horizon = raw.horizon.unwrap_or(DEFAULT_HORIZON);
    c.check(horizon >= 1, "horizon must be ≥ 1");
    let slot_duration = raw.slot_duration.unwrap_or(DEFAULT_SLOT_DURATION);
    c.check(slot_duration > 0.0, "slot_duration must be > 0");
    let packet_quantum = raw.packet_quantum.unwrap_or(DEFAULT_PACKET_QUANTUM);
    c.check(packet_quantum > 0.0, "packet_quantum must be > 0");

    let homes = validate_homes(&mut c, raw.homes, horizon, packet_quantum);

    let num_prosumers = raw.num_prosumers.unwrap_or(homes.len());
    c.check(num_prosumers >= 1, "num_prosumers must be ≥ 1");

    let pv = validate_pv(&mut c, raw.pv);
    let ess = validate_ess(&mut c, raw.ess);
    let tariff = validate_tariff(&mut c, raw.tariff, horizon);
    let weather = validate_weather(&mut c, raw.weather, horizon);
    let weights = validate_weights(&mut c, raw.weights, packet_quantum);
    let optimizer = validate_optimizer(&mut c, raw.optimizer.unwrap_or_default());

    if !c.violations.is_empty() {
        return Err(ScenarioError {
            violations: c.violations,
        });
    }

    Ok(Scenario {
        horizon,
        slot_duration,
        packet_quantum,
        num_prosumers,
        homes,
        pv,
        ess,
        tariff,
        weather,
        weights,
        seed_default: raw.seed_default.unwrap_or(DEFAULT_SEED),
        swap_transaction_prices: raw.swap_transaction_prices.unwrap_or(false),
        optimizer,
    })
}

fn validate_homes(
    c: &mut Checker,
    homes: Option<Vec<RawHome>>,
    horizon: usize,
    packet_quantum: f64,
) -> Vec<HomeProfile> {
    let Some(homes) = c.require(homes, "homes") else {
        return Vec::new();
    };
    c.check(!homes.is_empty(), "homes must contain at least one home");
    homes
        .into_iter()
        .enumerate()
        .map(|(b, home)| {
            let loads = c
                .require(home.loads, &format!("homes[{b}].loads"))
                .unwrap_or_default();
            let loads = loads
                .into_iter()
                .enumerate()
                .map(|(l, load)| validate_load(c, load, b, l, horizon, packet_quantum))
                .collect();
            HomeProfile { loads }
        })
        .collect()
}

fn validate_load(
    c: &mut Checker,
    raw: RawLoad,
    home: usize,
    load: usize,
    horizon: usize,
    packet_quantum: f64,
) -> LoadSpec {
    let name = format!("homes[{home}].loads[{load}]");
    let packets_required = raw.packets_required.unwrap_or(1);
    let packet_energy = raw.packet_energy.unwrap_or(packet_quantum);
    let request_slot = raw.request_slot.unwrap_or(0);
    let latest_start = raw.latest_start.unwrap_or(request_slot);
    let max_delay = raw
        .max_delay
        .unwrap_or_else(|| latest_start.saturating_sub(request_slot));
    let contiguous = raw.contiguous.unwrap_or(false);

    c.check(
        packets_required >= 1,
        format!("{name}: packets_required must be ≥ 1"),
    );
    c.check(
        packet_energy > 0.0,
        format!("{name}: packet_energy must be > 0"),
    );
    c.check(
        latest_start < horizon,
        format!("{name}: latest_start {latest_start} out of horizon {horizon}"),
    );
    c.check(
        request_slot <= latest_start,
        format!("{name}: request_slot {request_slot} after latest_start {latest_start}"),
    );
    c.check(
        latest_start.saturating_sub(request_slot) <= max_delay,
        format!("{name}: start window wider than max_delay {max_delay}"),
    );
    if contiguous {
        c.check(
            latest_start + packets_required <= horizon,
            format!("{name}: contiguous run of {packets_required} packets overflows the horizon"),
        );
    } else {
        c.check(
            packets_required <= latest_start - request_slot.min(latest_start) + 1,
            format!(
                "{name}: window [{request_slot}, {latest_start}] too small for {packets_required} packets"
            ),
        );
    }

    LoadSpec {
        packets_required,
        packet_energy,
        request_slot,
        latest_start,
        max_delay,
        contiguous,
    }
}

fn validate_pv(c: &mut Checker, raw: Option<RawPv>) -> PvSpec {
    let Some(raw) = c.require(raw, "pv") else {
        return PvSpec {
            efficiency: 0.18,
            area: 1.0,
            max_output: 1.0,
        };
    };
    let efficiency = raw.efficiency.unwrap_or(0.18);
    let area = c.require(raw.area, "pv.area").unwrap_or(1.0);
    let max_output = c.require(raw.max_output, "pv.max_output").unwrap_or(1.0);
    c.check(
        efficiency > 0.0 && efficiency <= 1.0,
        "pv.efficiency must be in (0, 1]",
    );
    c.check(area > 0.0, "pv.area must be > 0");
    c.check(max_output > 0.0, "pv.max_output must be > 0");
    PvSpec {
        efficiency,
        area,
        max_output,
    }
}

fn validate_ess(c: &mut Checker, raw: Option<RawEss>) -> EssSpec {
    let Some(raw) = c.require(raw, "ess") else {
        return EssSpec {
            capacity: 1.0,
            floor: 0.0,
            decay: 1.0,
            charge_eff: 1.0,
            discharge_eff: 1.0,
            max_charge_rate: 1.0,
            max_discharge_rate: 1.0,
            kappa_charge: 0.0,
            kappa_discharge: 0.0,
            initial_level: 0.0,
        };
    };
    let capacity = c.require(raw.capacity, "ess.capacity").unwrap_or(1.0);
    let floor = raw.floor.unwrap_or(0.0);
    let decay = raw.decay.unwrap_or(1.0);
    let charge_eff = raw.charge_eff.unwrap_or(1.0);
    let discharge_eff = raw.discharge_eff.unwrap_or(1.0);
    let max_charge_rate = raw.max_charge_rate.unwrap_or(capacity);
    let max_discharge_rate = raw.max_discharge_rate.unwrap_or(capacity);
    let kappa_charge = raw.kappa_charge.unwrap_or(0.0);
    let kappa_discharge = raw.kappa_discharge.unwrap_or(0.0);
    let initial_level = raw.initial_level.unwrap_or(floor);

    c.check(floor >= 0.0, "ess.floor must be ≥ 0");
    c.check(floor <= capacity, "ess.floor must not exceed ess.capacity");
    c.check(
        initial_level >= floor && initial_level <= capacity,
        "ess.initial_level must lie in [floor, capacity]",
    );
    c.check(decay > 0.0 && decay <= 1.0, "ess.decay must be in (0, 1]");
    c.check(
        charge_eff > 0.0 && charge_eff <= 1.0,
        "ess.charge_eff must be in (0, 1]",
    );
    c.check(
        discharge_eff > 0.0 && discharge_eff <= 1.0,
        "ess.discharge_eff must be in (0, 1]",
    );
    c.check(max_charge_rate > 0.0, "ess.max_charge_rate must be > 0");
    c.check(
        max_discharge_rate > 0.0,
        "ess.max_discharge_rate must be > 0",
    );
    c.check(kappa_charge >= 0.0, "ess.kappa_charge must be ≥ 0");
    c.check(kappa_discharge >= 0.0, "ess.kappa_discharge must be ≥ 0");

    EssSpec {
        capacity,
        floor,
        decay,
        charge_eff,
        discharge_eff,
        max_charge_rate,
        max_discharge_rate,
        kappa_charge,
        kappa_discharge,
        initial_level,
    }
}

fn validate_tariff(c: &mut Checker, raw: Option<RawTariff>, horizon: usize) -> GridTariff {
    let Some(raw) = c.require(raw, "tariff") else {
        return GridTariff {
            grid_buy: vec![2.0; horizon],
            grid_sell: vec![1.0; horizon],
        };
    };
    let grid_buy = c
        .require(raw.grid_buy, "tariff.grid_buy")
        .unwrap_or_else(|| vec![2.0; horizon]);
    let grid_sell = c
        .require(raw.grid_sell, "tariff.grid_sell")
        .unwrap_or_else(|| vec![1.0; horizon]);
    c.check(
        grid_buy.len() == horizon,
        format!(
            "tariff.grid_buy has {} entries, horizon is {horizon}",
            grid_buy.len()
        ),
    );
    c.check(
        grid_sell.len() == horizon,
        format!(
            "tariff.grid_sell has {} entries, horizon is {horizon}",
            grid_sell.len()
        ),
    );
    for t in 0..grid_buy.len().min(grid_sell.len()) {
        c.check(
            grid_sell[t] > 0.0 && grid_sell[t] < grid_buy[t],
            format!(
                "tariff slot {t}: require 0 < grid_sell ({}) < grid_buy ({})",
                grid_sell[t], grid_buy[t]
            ),
        );
    }
    GridTariff {
        grid_buy,
        grid_sell,
    }
}

fn validate_weather(c: &mut Checker, raw: Option<RawWeather>, horizon: usize) -> WeatherSeries {
    let Some(raw) = c.require(raw, "weather") else {
        return WeatherSeries {
            irradiance: vec![0.0; horizon],
            outdoor_temp: vec![25.0; horizon],
        };
    };
    let irradiance = c
        .require(raw.irradiance, "weather.irradiance")
        .unwrap_or_else(|| vec![0.0; horizon]);
    let outdoor_temp = raw.outdoor_temp.unwrap_or_else(|| vec![25.0; horizon]);
    c.check(
        irradiance.len() == horizon,
        format!(
            "weather.irradiance has {} entries, horizon is {horizon}",
            irradiance.len()
        ),
    );
    c.check(
        outdoor_temp.len() == horizon,
        format!(
            "weather.outdoor_temp has {} entries, horizon is {horizon}",
            outdoor_temp.len()
        ),
    );
    for (t, &i) in irradiance.iter().enumerate() {
        c.check(
            i >= 0.0,
            format!("weather.irradiance[{t}] must be ≥ 0, got {i}"),
        );
    }
    WeatherSeries {
        irradiance,
        outdoor_temp,
    }
}

fn validate_weights(c: &mut Checker, raw: Option<RawWeights>, packet_quantum: f64) -> ObjectiveWeights {
    let raw = raw.unwrap_or(RawWeights {
        w_delay: None,
        w_penalty: None,
        export_cap: None,
    });
    let w_delay = raw.w_delay.unwrap_or(10.0);
    let w_penalty = raw.w_penalty.unwrap_or(1000.0);
    let export_cap = raw.export_cap.unwrap_or(2.0 * packet_quantum);
    c.check(w_delay >= 0.0, "weights.w_delay must be ≥ 0");
    c.check(w_penalty >= 0.0, "weights.w_penalty must be ≥ 0");
    c.check(export_cap >= 0.0, "weights.export_cap must be ≥ 0");
    ObjectiveWeights {
        w_delay,
        w_penalty,
        export_cap,
    }
}

fn validate_optimizer(c: &mut Checker, raw: RawAlgoConfig) -> AlgoConfig {
    let defaults = AlgoConfig::default();
    let cfg = AlgoConfig {
        population: raw.population.unwrap_or(defaults.population),
        iterations: raw.iterations.unwrap_or(defaults.iterations),
        alpha_1: raw.alpha_1.unwrap_or(defaults.alpha_1),
        alpha_2: raw.alpha_2.unwrap_or(defaults.alpha_2),
        alpha: raw.alpha.unwrap_or(defaults.alpha),
        p_cr: raw.p_cr.unwrap_or(defaults.p_cr),
        v_max: raw.v_max.unwrap_or(defaults.v_max),
        ga_crossover_rate: raw.ga_crossover_rate.unwrap_or(defaults.ga_crossover_rate),
        ga_mutation_rate: raw.ga_mutation_rate.or(defaults.ga_mutation_rate),
        stagnation: raw.stagnation.unwrap_or(defaults.stagnation),
        seed: raw.seed.unwrap_or(defaults.seed),
    };
    c.check(cfg.population >= 2, "optimizer.population must be ≥ 2");
    c.check(cfg.iterations >= 1, "optimizer.iterations must be ≥ 1");
    c.check(
        (0.0..=1.0).contains(&cfg.p_cr),
        "optimizer.p_cr must be in [0, 1]",
    );
    c.check(cfg.v_max > 0.0, "optimizer.v_max must be > 0");
    c.check(
        (0.0..=1.0).contains(&cfg.ga_crossover_rate),
        "optimizer.ga_crossover_rate must be in [0, 1]",
    );
    if let Some(m) = cfg.ga_mutation_rate {
        c.check(
            (0.0..=1.0).contains(&m),
            "optimizer.ga_mutation_rate must be in [0, 1]",
        );
    }
    cfg
}
