//! Property tests for the model's contract invariants: price band
//! containment and monotonicity, packet conservation and window
//! containment after repair, delay bounds, PV monotonicity, demand
//! permutation invariance, battery trajectory bounds and the objective
//! identity.

use proptest::prelude::*;

use les_core::costs::{self, ObjectiveWeights};
use les_core::model;
use les_core::optimizer::repair;
use les_core::pricing::{internal_buy_price, internal_sell_price};
use les_core::scenario::{PvSpec, Scenario};
use les_core::schedule::{ScheduleDims, ScheduleMatrix};
use les_core::{fixtures, storage};

fn random_candidate(scenario: &Scenario, bits_seed: u64, density: f64) -> ScheduleMatrix {
    use rand::{Rng, SeedableRng};
    let dims = ScheduleDims::of(scenario);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(bits_seed);
    let bits: Vec<bool> = (0..dims.len()).map(|_| rng.gen_bool(density)).collect();
    ScheduleMatrix::from_bits(bits, dims)
}

proptest! {
    #[test]
    fn price_band_ordering_and_monotonicity(
        sell in 0.5f64..5.0,
        spread in 0.1f64..15.0,
        r1 in 0.0f64..2.0,
        r2 in 0.0f64..2.0,
    ) {
        let buy = sell + spread;
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        for r in [lo, hi] {
            let b = internal_buy_price(buy, sell, r);
            let s = internal_sell_price(buy, sell, r);
            prop_assert!(s <= b + 1e-12);
            prop_assert!(b <= buy + 1e-12 && b >= sell - 1e-12);
            prop_assert!(s <= buy + 1e-12 && s >= sell - 1e-12);
        }
        // nonincreasing in the ratio on [0, 1]
        let (lo1, hi1) = (lo.min(1.0), hi.min(1.0));
        prop_assert!(internal_buy_price(buy, sell, hi1) <= internal_buy_price(buy, sell, lo1) + 1e-9);
        prop_assert!(internal_sell_price(buy, sell, hi1) <= internal_sell_price(buy, sell, lo1) + 1e-9);
    }

    #[test]
    fn price_boundaries_exact(sell in 0.5f64..5.0, spread in 0.1f64..15.0, r in 1.0f64..3.0) {
        let buy = sell + spread;
        prop_assert!((internal_buy_price(buy, sell, 0.0) - buy).abs() < 1e-12);
        prop_assert!((internal_sell_price(buy, sell, 0.0) - buy).abs() < 1e-12);
        prop_assert!((internal_buy_price(buy, sell, r) - sell).abs() < 1e-12);
        prop_assert!((internal_sell_price(buy, sell, r) - sell).abs() < 1e-12);
    }

    #[test]
    fn price_curves_are_continuous(sell in 0.5f64..5.0, spread in 0.1f64..15.0, r in 0.001f64..0.999) {
        let buy = sell + spread;
        let eps = 1e-9;
        for f in [internal_buy_price, internal_sell_price] {
            let here = f(buy, sell, r);
            prop_assert!((f(buy, sell, r + eps) - here).abs() <= 1e-6);
            prop_assert!((f(buy, sell, r - eps) - here).abs() <= 1e-6);
        }
    }

    #[test]
    fn repair_enforces_conservation_and_windows(scn_seed in 0u64..300, bits_seed in 0u64..1000, density in 0.0f64..1.0) {
        let scn = fixtures::random_scenario(scn_seed);
        let repaired = repair(&random_candidate(&scn, bits_seed, density), &scn);
        for (b, home) in scn.homes.iter().enumerate() {
            for (l, load) in home.loads.iter().enumerate() {
                prop_assert_eq!(repaired.packets_scheduled(b, l), load.packets_required);
                let window = load.feasible_window();
                for t in 0..scn.horizon {
                    if repaired.get(b, l, t) {
                        prop_assert!(window.contains(&t), "bit at {t} outside {window:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn delays_stay_in_bounds(scn_seed in 0u64..200, bits_seed in 0u64..1000) {
        let scn = fixtures::random_scenario(scn_seed);
        let repaired = repair(&random_candidate(&scn, bits_seed, 0.4), &scn);
        let mut load_count = 0usize;
        for (b, home) in scn.homes.iter().enumerate() {
            for (l, load) in home.loads.iter().enumerate() {
                let start = repaired.actual_start(b, l).unwrap();
                let d = model::load_delay(load, start).unwrap();
                prop_assert!((0.0..=1.0).contains(&d));
                load_count += 1;
            }
        }
        let avg = model::average_delay(&repaired, &scn).unwrap();
        prop_assert!(avg >= 0.0);
        prop_assert!(avg <= load_count as f64 / scn.num_prosumers as f64 + 1e-12);
    }

    #[test]
    fn pv_output_monotone_in_irradiance_and_capped(
        eff in 0.05f64..1.0,
        area in 1.0f64..30.0,
        cap in 0.5f64..5.0,
        i1 in 0.0f64..1.5,
        i2 in 0.0f64..1.5,
        temp in -10.0f64..60.0,
    ) {
        let pv = PvSpec { efficiency: eff, area, max_output: cap };
        let (lo, hi) = if i1 <= i2 { (i1, i2) } else { (i2, i1) };
        let out_lo = model::pv_output(&pv, lo, temp, 1.0);
        let out_hi = model::pv_output(&pv, hi, temp, 1.0);
        prop_assert!(out_lo <= out_hi + 1e-12);
        prop_assert!((0.0..=cap + 1e-12).contains(&out_hi));
    }

    #[test]
    fn total_demand_invariant_under_in_window_permutation(scn_seed in 0u64..200, s1 in 0u64..500, s2 in 0u64..500) {
        let scn = fixtures::random_scenario(scn_seed);
        // two repaired candidates are in-window permutations of each other
        let a = repair(&random_candidate(&scn, s1, 0.3), &scn);
        let b = repair(&random_candidate(&scn, s2, 0.7), &scn);
        let da = model::total_demand(&a, &scn).unwrap();
        let db = model::total_demand(&b, &scn).unwrap();
        prop_assert!((da - db).abs() < 1e-9);
    }

    #[test]
    fn ess_trajectories_bounded_and_exclusive(scn_seed in 0u64..150, bits_seed in 0u64..500) {
        let scn = fixtures::random_scenario(scn_seed);
        let candidate = repair(&random_candidate(&scn, bits_seed, 0.5), &scn);
        let (_, trace) = costs::evaluate_detailed(&candidate, &scn).unwrap();
        for home in &trace.ess_states {
            for state in home {
                prop_assert!(state.level >= scn.ess.floor - 1e-9);
                prop_assert!(state.level <= scn.ess.capacity + 1e-9);
                prop_assert!(!(state.charged && state.discharged));
            }
        }
    }

    #[test]
    fn objective_is_exactly_the_component_sum(scn_seed in 0u64..150, bits_seed in 0u64..500, density in 0.0f64..1.0) {
        let scn = fixtures::random_scenario(scn_seed);
        // raw candidates too: infeasible ones exercise the penalty term
        let candidate = random_candidate(&scn, bits_seed, density);
        let b = costs::evaluate(&candidate, &scn).unwrap();
        prop_assert_eq!(b.objective, b.delay_cost + b.transaction_cost + b.degradation_cost + b.penalty);
        prop_assert!(b.penalty >= 0.0);
    }

    #[test]
    fn repaired_candidates_have_zero_penalty(scn_seed in 0u64..150, bits_seed in 0u64..500) {
        let scn = fixtures::random_scenario(scn_seed);
        let candidate = repair(&random_candidate(&scn, bits_seed, 0.5), &scn);
        let b = costs::evaluate(&candidate, &scn).unwrap();
        prop_assert_eq!(b.penalty, 0.0);
    }

    #[test]
    fn uniformly_higher_buy_tariff_never_lowers_the_objective(
        scn_seed in 0u64..150,
        bits_seed in 0u64..300,
        bump in 0.01f64..5.0,
    ) {
        let scn = fixtures::random_scenario(scn_seed);
        let candidate = repair(&random_candidate(&scn, bits_seed, 0.5), &scn);
        let before = costs::evaluate(&candidate, &scn).unwrap().objective;
        let mut raised = scn.clone();
        for p in raised.tariff.grid_buy.iter_mut() {
            *p += bump;
        }
        let after = costs::evaluate(&candidate, &raised).unwrap().objective;
        prop_assert!(after >= before - 1e-9, "before {before}, after {after}");
    }

    #[test]
    fn degradation_scales_linearly_in_kappa(scn_seed in 0u64..150, bits_seed in 0u64..300, scale in 0.1f64..5.0) {
        let scn = fixtures::random_scenario(scn_seed);
        let candidate = repair(&random_candidate(&scn, bits_seed, 0.5), &scn);
        let base = costs::evaluate(&candidate, &scn).unwrap().degradation_cost;
        let mut scaled = scn.clone();
        scaled.ess.kappa_charge *= scale;
        scaled.ess.kappa_discharge *= scale;
        let after = costs::evaluate(&candidate, &scaled).unwrap().degradation_cost;
        prop_assert!((after - base * scale).abs() <= 1e-9 * (1.0 + base.abs() * scale));
    }

    #[test]
    fn headroom_respecting_steps_stay_in_bounds(
        level_frac in 0.0f64..1.0,
        charge_frac in 0.0f64..1.0,
        discharge in proptest::bool::ANY,
        decay in 0.5f64..1.0,
        eff in 0.5f64..1.0,
    ) {
        let spec = storage::EssSpec {
            capacity: 5.0,
            floor: 0.5,
            decay,
            charge_eff: eff,
            discharge_eff: eff,
            max_charge_rate: 2.0,
            max_discharge_rate: 2.0,
            kappa_charge: 0.0,
            kappa_discharge: 0.0,
            initial_level: 0.5,
        };
        let state = storage::EssState {
            level: 0.5 + level_frac * 4.5,
            charged: false,
            discharged: false,
        };
        let next = if discharge {
            let amount = charge_frac * storage::discharge_headroom(&state, &spec);
            storage::step_ess(&state, 0.0, amount, &spec).unwrap()
        } else {
            let amount = charge_frac * storage::charge_headroom(&state, &spec);
            storage::step_ess(&state, amount, 0.0, &spec).unwrap()
        };
        prop_assert!(next.level >= spec.floor - 1e-12 && next.level <= spec.capacity + 1e-12);
    }
}

#[test]
fn delay_cost_weights_are_used_consistently() {
    let w = ObjectiveWeights {
        w_delay: 7.0,
        w_penalty: 0.0,
        export_cap: 1.0,
    };
    assert_eq!(costs::delay_cost(0.0, &w), 0.0);
    assert_eq!(costs::delay_cost(2.0, &w), 14.0);
}
