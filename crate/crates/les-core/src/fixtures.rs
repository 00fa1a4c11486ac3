//! Ready-made scenarios for tests, benchmarks and the shipped default
//! scenario file.
//!
//! `default_scenario` is the 10-home reference system: identical homes,
//! five flexible packet loads each, a midday PV bell capped at 2.85 kWh
//! per slot, a 5 kWh battery per home and a three-tier time-of-use tariff
//! inside the 1.5–9.5 cents/kWh band. `tiny_scenario(0..5)` are the
//! 2-home × 2-load × 6-slot instances small enough for the exhaustive
//! oracle (search spaces between 324 and 1296 candidates).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::optimizer::repair;
use crate::scenario::{
    validate_scenario, RawEss, RawHome, RawLoad, RawPv, RawScenario, RawTariff, RawWeather,
    RawWeights, Scenario,
};
use crate::schedule::ScheduleMatrix;

fn load(
    packets: usize,
    request: usize,
    latest: usize,
    contiguous: bool,
) -> RawLoad {
    RawLoad {
        packets_required: Some(packets),
        packet_energy: None,
        request_slot: Some(request),
        latest_start: Some(latest),
        max_delay: Some(latest - request),
        contiguous: Some(contiguous),
    }
}

fn homes(count: usize, loads: Vec<RawLoad>) -> Vec<RawHome> {
    (0..count)
        .map(|_| RawHome {
            loads: Some(loads.clone()),
        })
        .collect()
}

/// Raw form of the default 10-home scenario; the validated form is
/// [`default_scenario`] and the shipped `scenarios/default.json` matches
/// it byte for byte.
pub fn default_raw() -> RawScenario {
    let loads = vec![
        // washing machine: one 4-slot run between 08:00 and 13:00
        load(4, 8, 13, true),
        // dishwasher: one 3-slot run starting in the evening peak
        load(3, 17, 21, true),
        // EV charging: 3 kWh spread anywhere over the evening window
        load(6, 16, 23, false),
        // water heater: 3 kWh across the morning
        load(6, 4, 11, false),
    ];
    RawScenario {
        horizon: Some(24),
        slot_duration: Some(1.0),
        packet_quantum: Some(0.5),
        num_prosumers: Some(10),
        homes: Some(homes(10, loads)),
        pv: Some(RawPv {
            efficiency: Some(0.18),
            area: Some(16.0),
            max_output: Some(2.85),
        }),
        ess: Some(RawEss {
            capacity: Some(5.0),
            floor: Some(0.5),
            decay: Some(0.8),
            charge_eff: Some(0.7),
            discharge_eff: Some(0.7),
            max_charge_rate: Some(1.5),
            max_discharge_rate: Some(1.0),
            kappa_charge: Some(0.5),
            kappa_discharge: Some(0.5),
            initial_level: Some(0.5),
        }),
        tariff: Some(RawTariff {
            grid_buy: Some(vec![
                3.5, 3.5, 3.5, 2.5, 3.5, 3.5, // night valley with one dip slot
                6.5, 6.5, 6.5, 6.5, // morning shoulder
                4.5, 4.5, 4.5, 4.5, 4.5, 4.5, // midday
                9.5, 9.5, 9.5, 9.5, 9.5, // evening peak
                4.0, 4.0, 4.0, // late evening
            ]),
            grid_sell: Some(vec![1.5; 24]),
        }),
        weather: Some(RawWeather {
            irradiance: Some(vec![
                0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.15, 0.45, 0.8, 1.0, 1.0, 0.8,
                0.45, 0.15, 0.05, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
            ]),
            outdoor_temp: Some(vec![
                15.0, 14.0, 14.0, 13.0, 13.0, 14.0, 15.0, 16.0, 18.0, 19.0, 20.0, 21.0, 22.0,
                23.0, 23.0, 22.0, 21.0, 20.0, 19.0, 18.0, 17.0, 16.0, 16.0, 15.0,
            ]),
        }),
        // w_delay: a fully delayed day (all 40 loads at their latest start,
        // average delay 4.0) costs 40 cents, about one day's median bill.
        weights: Some(RawWeights {
            w_delay: Some(10.0),
            w_penalty: Some(1000.0),
            export_cap: Some(1.0),
        }),
        seed_default: Some(42),
        swap_transaction_prices: Some(false),
        optimizer: None,
    }
}

pub fn default_scenario() -> Scenario {
    validate_scenario(default_raw()).expect("default scenario is valid")
}

/// The five fixed oracle-sized instances. `index` is taken modulo 5.
pub fn tiny_scenario(index: usize) -> Scenario {
    let raw = match index % 5 {
        0 => tiny_raw(
            vec![load(1, 0, 5, false), load(2, 1, 4, false)],
            vec![4.0, 2.0, 2.0, 6.0, 9.0, 5.0],
            vec![0.0, 0.0, 0.8, 1.0, 0.3, 0.0],
        ),
        1 => tiny_raw(
            vec![load(2, 0, 4, true), load(1, 2, 5, false)],
            vec![3.0, 3.0, 8.0, 8.0, 4.0, 2.0],
            vec![0.0, 0.5, 1.0, 0.5, 0.0, 0.0],
        ),
        2 => tiny_raw(
            vec![load(3, 0, 4, false), load(1, 3, 5, false)],
            vec![6.0, 5.0, 4.0, 3.0, 2.0, 7.0],
            vec![0.2, 0.4, 0.6, 0.4, 0.2, 0.0],
        ),
        3 => tiny_raw(
            vec![load(2, 0, 3, false), load(2, 2, 4, true)],
            vec![2.0, 4.0, 9.0, 9.0, 4.0, 2.0],
            vec![0.0, 0.0, 0.3, 0.9, 0.9, 0.3],
        ),
        _ => tiny_raw(
            vec![load(1, 0, 5, false), load(2, 0, 2, false)],
            vec![5.0, 2.5, 2.5, 5.0, 9.5, 9.5],
            vec![0.6, 0.8, 0.6, 0.3, 0.0, 0.0],
        ),
    };
    validate_scenario(raw).expect("tiny scenario is valid")
}

fn tiny_raw(loads: Vec<RawLoad>, grid_buy: Vec<f64>, irradiance: Vec<f64>) -> RawScenario {
    let horizon = grid_buy.len();
    RawScenario {
        horizon: Some(horizon),
        slot_duration: Some(1.0),
        packet_quantum: Some(0.5),
        num_prosumers: None,
        homes: Some(homes(2, loads)),
        pv: Some(RawPv {
            efficiency: Some(0.18),
            area: Some(10.0),
            max_output: Some(2.0),
        }),
        ess: Some(RawEss {
            capacity: Some(2.0),
            floor: Some(0.0),
            decay: Some(0.9),
            charge_eff: Some(0.8),
            discharge_eff: Some(0.8),
            max_charge_rate: Some(1.0),
            max_discharge_rate: Some(1.0),
            kappa_charge: Some(0.5),
            kappa_discharge: Some(0.5),
            initial_level: Some(0.0),
        }),
        tariff: Some(RawTariff {
            grid_sell: Some(vec![1.0; horizon]),
            grid_buy: Some(grid_buy),
        }),
        weather: Some(RawWeather {
            irradiance: Some(irradiance),
            outdoor_temp: Some(vec![20.0; horizon]),
        }),
        weights: Some(RawWeights {
            w_delay: Some(10.0),
            w_penalty: Some(1000.0),
            export_cap: Some(1.0),
        }),
        seed_default: Some(1),
        swap_transaction_prices: Some(false),
        optimizer: None,
    }
}

/// One home, one single-packet load with window [8, 16] over 24 slots.
pub fn single_home_single_load_scenario() -> Scenario {
    let raw = RawScenario {
        horizon: Some(24),
        num_prosumers: Some(1),
        homes: Some(homes(1, vec![load(1, 8, 16, false)])),
        pv: Some(RawPv {
            efficiency: Some(0.18),
            area: Some(10.0),
            max_output: Some(2.0),
        }),
        ess: Some(RawEss {
            capacity: Some(2.0),
            floor: Some(0.0),
            decay: Some(1.0),
            charge_eff: Some(1.0),
            discharge_eff: Some(1.0),
            max_charge_rate: Some(1.0),
            max_discharge_rate: Some(1.0),
            kappa_charge: Some(0.0),
            kappa_discharge: Some(0.0),
            initial_level: Some(0.0),
        }),
        tariff: Some(RawTariff {
            grid_buy: Some(vec![5.0; 24]),
            grid_sell: Some(vec![1.5; 24]),
        }),
        weather: Some(RawWeather {
            irradiance: Some(vec![0.0; 24]),
            outdoor_temp: Some(vec![20.0; 24]),
        }),
        weights: None,
        ..RawScenario::default()
    };
    validate_scenario(raw).expect("valid")
}

/// Two identical homes with one 3-packet load each.
pub fn two_homes_one_load_scenario() -> Scenario {
    let raw = RawScenario {
        horizon: Some(6),
        homes: Some(homes(2, vec![load(3, 0, 3, false)])),
        pv: Some(RawPv {
            efficiency: Some(0.18),
            area: Some(10.0),
            max_output: Some(2.0),
        }),
        ess: Some(RawEss {
            capacity: Some(1.0),
            floor: Some(0.0),
            decay: Some(1.0),
            charge_eff: Some(1.0),
            discharge_eff: Some(1.0),
            max_charge_rate: Some(1.0),
            max_discharge_rate: Some(1.0),
            kappa_charge: Some(0.0),
            kappa_discharge: Some(0.0),
            initial_level: Some(0.0),
        }),
        tariff: Some(RawTariff {
            grid_buy: Some(vec![5.0; 6]),
            grid_sell: Some(vec![1.0; 6]),
        }),
        weather: Some(RawWeather {
            irradiance: Some(vec![0.0; 6]),
            outdoor_temp: Some(vec![20.0; 6]),
        }),
        ..RawScenario::default()
    };
    validate_scenario(raw).expect("valid")
}

/// One home with a 3-packet contiguous load, request 2, latest start 6.
pub fn contiguous_scenario() -> Scenario {
    let raw = RawScenario {
        horizon: Some(10),
        homes: Some(homes(1, vec![load(3, 2, 6, true)])),
        pv: Some(RawPv {
            efficiency: Some(0.18),
            area: Some(10.0),
            max_output: Some(2.0),
        }),
        ess: Some(RawEss {
            capacity: Some(1.0),
            floor: Some(0.0),
            decay: Some(1.0),
            charge_eff: Some(1.0),
            discharge_eff: Some(1.0),
            max_charge_rate: Some(1.0),
            max_discharge_rate: Some(1.0),
            kappa_charge: Some(0.0),
            kappa_discharge: Some(0.0),
            initial_level: Some(0.0),
        }),
        tariff: Some(RawTariff {
            grid_buy: Some(vec![5.0; 10]),
            grid_sell: Some(vec![1.0; 10]),
        }),
        weather: Some(RawWeather {
            irradiance: Some(vec![0.0; 10]),
            outdoor_temp: Some(vec![20.0; 10]),
        }),
        ..RawScenario::default()
    };
    validate_scenario(raw).expect("valid")
}

/// One home, one packet, flat expensive tariff, free PV only in slot 3 —
/// the optimum provably uses that slot.
pub fn pv_valley_scenario() -> Scenario {
    let raw = RawScenario {
        horizon: Some(6),
        num_prosumers: Some(1),
        homes: Some(homes(1, vec![load(1, 0, 5, false)])),
        pv: Some(RawPv {
            efficiency: Some(0.18),
            area: Some(10.0),
            max_output: Some(2.0),
        }),
        ess: Some(RawEss {
            capacity: Some(1.0),
            floor: Some(0.0),
            decay: Some(1.0),
            charge_eff: Some(1.0),
            discharge_eff: Some(1.0),
            max_charge_rate: Some(1.0),
            max_discharge_rate: Some(1.0),
            // make storing the slot-3 surplus unattractive
            kappa_charge: Some(50.0),
            kappa_discharge: Some(50.0),
            initial_level: Some(0.0),
        }),
        tariff: Some(RawTariff {
            grid_buy: Some(vec![9.5; 6]),
            grid_sell: Some(vec![1.5; 6]),
        }),
        weather: Some(RawWeather {
            irradiance: Some(vec![0.0, 0.0, 0.0, 0.5, 0.0, 0.0]),
            outdoor_temp: Some(vec![25.0; 6]),
        }),
        weights: Some(RawWeights {
            w_delay: Some(1.0),
            w_penalty: Some(1000.0),
            export_cap: Some(1.0),
        }),
        ..RawScenario::default()
    };
    validate_scenario(raw).expect("valid")
}

/// Every load at its request slot (non-contiguous loads filled from the
/// window start), the canonical feasible baseline.
pub fn unscheduled_matrix(scenario: &Scenario) -> ScheduleMatrix {
    repair(&ScheduleMatrix::zeros(scenario), scenario)
}

/// Seeded generator of small valid scenarios for randomized invariant
/// sweeps: 1–3 homes, 1–3 loads each, horizons of 8–16 slots, randomized
/// windows, tariffs, weather and battery parameters.
pub fn random_scenario(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let horizon = rng.gen_range(8..=16);
    let num_homes = rng.gen_range(1..=3);
    let homes: Vec<RawHome> = (0..num_homes)
        .map(|_| {
            let n_loads = rng.gen_range(1..=3);
            let loads = (0..n_loads)
                .map(|_| {
                    let contiguous = rng.gen_bool(0.3);
                    let packets = rng.gen_range(1..=3);
                    let (request, latest) = loop {
                        let request = rng.gen_range(0..horizon - 1);
                        let span = rng.gen_range(packets..=packets + 4);
                        let latest = (request + span - 1).min(horizon - 1);
                        if contiguous {
                            if latest + packets <= horizon {
                                break (request, latest);
                            }
                        } else if latest - request + 1 >= packets {
                            break (request, latest);
                        }
                    };
                    load(packets, request, latest, contiguous)
                })
                .collect();
            RawHome { loads: Some(loads) }
        })
        .collect();

    let grid_sell: Vec<f64> = (0..horizon).map(|_| rng.gen_range(0.5..2.0)).collect();
    let grid_buy: Vec<f64> = grid_sell
        .iter()
        .map(|&s| s + rng.gen_range(0.5..8.0))
        .collect();
    let capacity = rng.gen_range(1.0..6.0);
    let floor = rng.gen_range(0.0..capacity / 3.0);
    let raw = RawScenario {
        horizon: Some(horizon),
        slot_duration: Some(1.0),
        packet_quantum: Some(0.5),
        num_prosumers: None,
        homes: Some(homes),
        pv: Some(RawPv {
            efficiency: Some(rng.gen_range(0.1..0.25)),
            area: Some(rng.gen_range(5.0..20.0)),
            max_output: Some(rng.gen_range(1.0..3.0)),
        }),
        ess: Some(RawEss {
            capacity: Some(capacity),
            floor: Some(floor),
            decay: Some(rng.gen_range(0.7..1.0)),
            charge_eff: Some(rng.gen_range(0.6..1.0)),
            discharge_eff: Some(rng.gen_range(0.6..1.0)),
            max_charge_rate: Some(rng.gen_range(0.5..3.0)),
            max_discharge_rate: Some(rng.gen_range(0.5..3.0)),
            kappa_charge: Some(rng.gen_range(0.0..2.0)),
            kappa_discharge: Some(rng.gen_range(0.0..2.0)),
            initial_level: Some(rng.gen_range(floor..=capacity)),
        }),
        tariff: Some(RawTariff {
            grid_buy: Some(grid_buy),
            grid_sell: Some(grid_sell),
        }),
        weather: Some(RawWeather {
            irradiance: Some((0..horizon).map(|_| rng.gen_range(0.0..1.2)).collect()),
            outdoor_temp: Some((0..horizon).map(|_| rng.gen_range(5.0..35.0)).collect()),
        }),
        weights: Some(RawWeights {
            w_delay: Some(rng.gen_range(1.0..20.0)),
            w_penalty: Some(1000.0),
            export_cap: Some(rng.gen_range(0.5..2.0)),
        }),
        seed_default: Some(seed),
        swap_transaction_prices: Some(rng.gen_bool(0.2)),
        optimizer: None,
    };
    validate_scenario(raw).expect("generated scenario is valid")
}
