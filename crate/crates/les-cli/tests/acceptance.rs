//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its measured numbers (run with `--nocapture` to see them all).
//!
//! 1. Oracle equivalence of the search algorithms on five tiny scenarios.
//! 2. Directional comparison on the default scenario over 30 seeds.
//! 3. Randomized pricing-curve suite (1e6 samples).
//! 4. Conservation and battery bounds over randomized candidates/episodes.
//! 5. Exact cost identity and episode round-trip.
//! 6. Byte-identical CLI reruns, independent of the thread cap.
//! 7. Crossover-mechanism checks (branch frequency, boundaries, traces).
//! 8. Runtime budget of a default-configuration run.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use les_core::costs::{self};
use les_core::mas;
use les_core::optimizer::{self, crbpso_velocity, AlgoConfig, Algorithm, CrossoverBranch};
use les_core::oracle;
use les_core::pricing::{internal_buy_price, internal_sell_price};
use les_core::scenario::Scenario;
use les_core::schedule::{ScheduleDims, ScheduleMatrix};
use les_core::{fixtures, optimizer::repair};

fn repo_scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn random_candidate(scenario: &Scenario, seed: u64, density: f64) -> ScheduleMatrix {
    let dims = ScheduleDims::of(scenario);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bits: Vec<bool> = (0..dims.len()).map(|_| rng.gen_bool(density)).collect();
    ScheduleMatrix::from_bits(bits, dims)
}

/// Criterion 1: on the five tiny scenarios, crBPSO (pop 30, 300 iters)
/// reaches the brute-force optimum within 1e-9 in at least 16 of 20 fixed
/// seeds, GA and BPSO in at least 12, all inside 60 seconds.
#[test]
fn criterion_1_oracle_equivalence() {
    let started = Instant::now();
    let mut hits = [0usize; 3]; // crbpso, ga, bpso
    const ALGOS: [Algorithm; 3] = [Algorithm::CrBpso, Algorithm::Ga, Algorithm::Bpso];
    for idx in 0..5 {
        let scenario = fixtures::tiny_scenario(idx);
        let (_, optimum) = oracle::enumerate_optimum(&scenario).expect("tiny search space");
        let cells: Vec<(usize, bool)> = ALGOS
            .iter()
            .enumerate()
            .flat_map(|(a, &algo)| (1..=20u64).map(move |seed| (a, algo, seed)))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(a, algo, seed)| {
                let cfg = AlgoConfig {
                    population: 30,
                    iterations: 300,
                    seed,
                    ..AlgoConfig::default()
                };
                let result = optimizer::run(algo, &scenario, &cfg);
                (a, (result.best.objective - optimum.objective).abs() < 1e-9)
            })
            .collect();
        let mut scenario_hits = [0usize; 3];
        for (a, hit) in cells {
            if hit {
                scenario_hits[a] += 1;
            }
        }
        for (a, algo) in ALGOS.iter().enumerate() {
            assert!(
                scenario_hits[a] >= if a == 0 { 16 } else { 12 },
                "{algo} hit the optimum only {}/20 times on tiny scenario {idx}",
                scenario_hits[a]
            );
            hits[a] += scenario_hits[a];
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "oracle-equivalence phase took {elapsed:.1?}"
    );
    println!(
        "criterion 1: PASS — optimum hits over 5x20 seeds: crbpso {}/100, ga {}/100, bpso {}/100 in {elapsed:.1?}",
        hits[0], hits[1], hits[2]
    );
}

/// Criterion 2: on the shipped default scenario, the mean crBPSO objective
/// over seeds 1..=30 is at or below the GA and BPSO means, and every
/// scheduled algorithm beats the unscheduled baseline.
#[test]
fn criterion_2_directional_comparison() {
    let scenario = Scenario::from_json_file(repo_scenario("default.json")).unwrap();
    let (_, baseline) = oracle::unscheduled_baseline(&scenario);

    let mean_of = |algo: Algorithm| -> f64 {
        let objectives: Vec<f64> = (1..=30u64)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|seed| {
                let cfg = AlgoConfig {
                    seed,
                    ..scenario.optimizer
                };
                optimizer::run(algo, &scenario, &cfg).best.objective
            })
            .collect();
        objectives.iter().sum::<f64>() / objectives.len() as f64
    };

    let ga = mean_of(Algorithm::Ga);
    let bpso = mean_of(Algorithm::Bpso);
    let crbpso = mean_of(Algorithm::CrBpso);

    assert!(crbpso <= ga, "crbpso mean {crbpso} above ga mean {ga}");
    assert!(crbpso <= bpso, "crbpso mean {crbpso} above bpso mean {bpso}");
    for (name, mean) in [("ga", ga), ("bpso", bpso), ("crbpso", crbpso)] {
        assert!(
            mean < baseline.objective,
            "{name} mean {mean} does not beat the unscheduled baseline {}",
            baseline.objective
        );
    }
    println!(
        "criterion 2: PASS — means over 30 seeds: unscheduled {:.4}, ga {ga:.4}, bpso {bpso:.4}, crbpso {crbpso:.4} \
         (crbpso improves on ga by {:.2}%, on bpso by {:.2}%, on baseline by {:.2}%)",
        baseline.objective,
        100.0 * (ga - crbpso) / ga,
        100.0 * (bpso - crbpso) / bpso,
        100.0 * (baseline.objective - crbpso) / baseline.objective,
    );
}

/// Criterion 3: 1e6 randomized (tariff, ratio) samples keep both internal
/// prices inside the band, ordered, monotone in the ratio on [0, 1], exact
/// at the boundaries within 1e-12; the three canonical ratio cases hold;
/// all inside 5 seconds.
#[test]
fn criterion_3_pricing_suite() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1_000_000 {
        let sell = rng.gen_range(0.5..5.0);
        let buy = sell + rng.gen_range(0.1..15.0);
        let r = rng.gen_range(0.0..2.0);
        let b = internal_buy_price(buy, sell, r);
        let s = internal_sell_price(buy, sell, r);
        assert!(s >= sell - 1e-12 && s <= buy + 1e-12, "sell price out of band");
        assert!(b >= sell - 1e-12 && b <= buy + 1e-12, "buy price out of band");
        assert!(b >= s - 1e-12, "ordering violated");

        // monotone on [0, 1]
        let r2 = rng.gen_range(0.0..1.0);
        let r1 = r2 * rng.gen::<f64>();
        assert!(internal_buy_price(buy, sell, r2) <= internal_buy_price(buy, sell, r1) + 1e-12);
        assert!(internal_sell_price(buy, sell, r2) <= internal_sell_price(buy, sell, r1) + 1e-12);

        // boundary exactness
        assert!((internal_buy_price(buy, sell, 0.0) - buy).abs() <= 1e-12);
        let r_hi = 1.0 + rng.gen::<f64>();
        assert!((internal_buy_price(buy, sell, r_hi) - sell).abs() <= 1e-12);
        assert!((internal_sell_price(buy, sell, r_hi) - sell).abs() <= 1e-12);
    }

    // canonical cases for the 1.5–9.5 band
    assert_eq!(internal_buy_price(9.5, 1.5, 0.0), 9.5);
    assert_eq!(internal_sell_price(9.5, 1.5, 0.0), 9.5);
    assert_eq!(internal_buy_price(9.5, 1.5, 1.0), 1.5);
    assert_eq!(internal_sell_price(9.5, 1.5, 1.0), 1.5);
    let s_mid = internal_sell_price(9.5, 1.5, 0.5);
    assert!((s_mid - 14.25 / 5.5).abs() < 1e-12);
    assert!((internal_buy_price(9.5, 1.5, 0.5) - (s_mid * 0.5 + 9.5 * 0.5)).abs() < 1e-12);

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "pricing suite took {elapsed:.1?}");
    println!("criterion 3: PASS — 1e6 samples in {elapsed:.2?}");
}

/// Criterion 4: 1e4 randomized candidates conserve packets and stay inside
/// their windows after repair, and every battery trajectory in 1e3
/// randomized episodes stays inside [floor, capacity] without charging and
/// discharging in the same slot.
#[test]
fn criterion_4_conservation_and_bounds() {
    // 100 scenarios x 100 candidates
    let repaired: Vec<(u64, u64)> = (0..100u64)
        .flat_map(|s| (0..100u64).map(move |c| (s, c)))
        .collect();
    repaired.par_iter().for_each(|&(scn_seed, cand_seed)| {
        let scenario = fixtures::random_scenario(scn_seed);
        let density = (cand_seed % 10) as f64 / 10.0;
        let candidate = repair(
            &random_candidate(&scenario, 1000 + cand_seed, density),
            &scenario,
        );
        for (b, home) in scenario.homes.iter().enumerate() {
            for (l, load) in home.loads.iter().enumerate() {
                assert_eq!(
                    candidate.packets_scheduled(b, l),
                    load.packets_required,
                    "conservation violated (scenario {scn_seed}, candidate {cand_seed})"
                );
                let window = load.feasible_window();
                for t in 0..scenario.horizon {
                    assert!(
                        !candidate.get(b, l, t) || window.contains(&t),
                        "window violated at slot {t} (scenario {scn_seed}, candidate {cand_seed})"
                    );
                }
            }
        }
    });

    // 1000 episodes of the full dispatch pipeline
    (0..1000u64).collect::<Vec<_>>().par_iter().for_each(|&i| {
        let scenario = fixtures::random_scenario(i);
        let candidate = repair(&random_candidate(&scenario, 7000 + i, 0.5), &scenario);
        let (_, trace) = costs::evaluate_detailed(&candidate, &scenario).unwrap();
        for home in &trace.ess_states {
            for state in home {
                assert!(
                    state.level >= scenario.ess.floor - 1e-9
                        && state.level <= scenario.ess.capacity + 1e-9,
                    "battery level {} out of [{}, {}] (episode {i})",
                    state.level,
                    scenario.ess.floor,
                    scenario.ess.capacity
                );
                assert!(
                    !(state.charged && state.discharged),
                    "simultaneous charge and discharge (episode {i})"
                );
            }
        }
    });
    println!("criterion 4: PASS — 1e4 repaired candidates, 1e3 episode trajectories");
}

/// Criterion 5: the objective equals the sum of its four components
/// bit-exactly on 1e3 randomized candidates, and an episode's realized
/// objective reproduces the optimizer-reported one bit-exactly.
#[test]
fn criterion_5_cost_identity_and_round_trip() {
    (0..1000u64).collect::<Vec<_>>().par_iter().for_each(|&i| {
        let scenario = fixtures::random_scenario(i);
        let density = (i % 11) as f64 / 10.0;
        // raw candidates included: the identity must hold with penalties too
        let candidate = random_candidate(&scenario, 31 * i + 1, density);
        let b = costs::evaluate(&candidate, &scenario).unwrap();
        assert_eq!(
            b.objective,
            b.delay_cost + b.transaction_cost + b.degradation_cost + b.penalty,
            "objective identity broken (candidate {i})"
        );
    });

    (0..10u64).collect::<Vec<_>>().par_iter().for_each(|&i| {
        let scenario = fixtures::random_scenario(i);
        let cfg = AlgoConfig {
            population: 10,
            iterations: 15,
            seed: i,
            ..AlgoConfig::default()
        };
        let log = mas::run_episode(&scenario, Algorithm::CrBpso, &cfg, false).unwrap();
        let direct = costs::evaluate(&log.realized_schedule, &scenario).unwrap();
        assert_eq!(log.breakdown.objective, log.result.best.objective);
        assert_eq!(log.breakdown.objective, direct.objective);
        assert_eq!(log.breakdown, direct);
    });
    println!("criterion 5: PASS — 1e3 exact identities, 10 bit-exact episode round-trips");
}

/// Criterion 6: rerunning the CLI with identical (scenario, algo, seed)
/// produces byte-identical episode.jsonl, trace.csv and costs.csv, whatever
/// CRBPSO_LES_THREADS says.
#[test]
fn criterion_6_cli_determinism() {
    let scenario = repo_scenario("default.json");
    let mut outputs: Vec<[Vec<u8>; 3]> = Vec::new();
    for threads in ["1", "2", "0"] {
        let dir = tempfile::tempdir().unwrap();
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_crbpso-les"))
            .args([
                "run",
                scenario.to_str().unwrap(),
                "--algo",
                "crbpso",
                "--seed",
                "11",
                "--out",
                dir.path().to_str().unwrap(),
            ])
            .env("CRBPSO_LES_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push([
            fs::read(dir.path().join("episode.jsonl")).unwrap(),
            fs::read(dir.path().join("trace.csv")).unwrap(),
            fs::read(dir.path().join("costs.csv")).unwrap(),
        ]);
    }
    for other in &outputs[1..] {
        for (i, name) in ["episode.jsonl", "trace.csv", "costs.csv"].iter().enumerate() {
            assert_eq!(outputs[0][i], other[i], "{name} differs across runs/thread caps");
        }
    }
    println!("criterion 6: PASS — byte-identical outputs across reruns and thread caps 1/2/auto");
}

/// Criterion 7: the crossover branch frequency over 1e4 draws is within
/// ±0.02 of p_cr, the p_cr ∈ {{0, 1}} boundaries are exact, and all three
/// algorithms produce monotone nonincreasing best-objective traces.
#[test]
fn criterion_7_crossover_mechanism() {
    // branch frequency
    let cfg = AlgoConfig::default(); // p_cr = 0.5
    let velocity = vec![0.0; 8];
    let position = vec![false; 8];
    let local = vec![true; 8];
    let global = vec![false; 8];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 10_000;
    let cognitive = (0..n)
        .filter(|_| {
            let (_, branch) =
                crbpso_velocity(&velocity, &position, &local, &global, &cfg, &mut rng);
            branch == CrossoverBranch::Cognitive
        })
        .count();
    let freq = cognitive as f64 / n as f64;
    assert!(
        (freq - cfg.p_cr).abs() <= 0.02,
        "cognitive branch frequency {freq} vs p_cr {}",
        cfg.p_cr
    );

    // boundary behaviour: the non-selected pull never contributes. With the
    // pull target equal to the position, the velocity must stay unchanged.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (p_cr, expected) in [(1.0, CrossoverBranch::Cognitive), (0.0, CrossoverBranch::Social)] {
        let cfg = AlgoConfig {
            p_cr,
            ..AlgoConfig::default()
        };
        for _ in 0..200 {
            let position = vec![true, false, true, false];
            let flipped = vec![false, true, false, true];
            // the selected pull's target equals the position, so any change
            // to the velocity could only come from the non-selected pull
            let (local, global) = if p_cr == 1.0 {
                (position.clone(), flipped.clone())
            } else {
                (flipped.clone(), position.clone())
            };
            let velocity = vec![0.25; 4];
            let (next, branch) =
                crbpso_velocity(&velocity, &position, &local, &global, &cfg, &mut rng);
            assert_eq!(branch, expected);
            assert_eq!(next, velocity, "non-selected pull leaked into the velocity");
        }
    }

    // monotone traces
    for algo in [Algorithm::Ga, Algorithm::Bpso, Algorithm::CrBpso] {
        for seed in [1u64, 2, 3] {
            let scenario = fixtures::tiny_scenario(seed as usize);
            let cfg = AlgoConfig {
                population: 12,
                iterations: 60,
                seed,
                ..AlgoConfig::default()
            };
            let result = optimizer::run(algo, &scenario, &cfg);
            for pair in result.trace.windows(2) {
                assert!(pair[1] <= pair[0], "{algo} trace increased");
            }
        }
    }
    println!(
        "criterion 7: PASS — branch frequency {freq:.4} (target {:.1}), exact boundaries, monotone traces",
        0.5
    );
}

/// Criterion 8: a single crBPSO run of the default configuration (10 homes,
/// 24 slots, population 50, 200 iterations) finishes in under 10 seconds.
#[test]
fn criterion_8_runtime_budget() {
    let scenario = Scenario::from_json_file(repo_scenario("default.json")).unwrap();
    let cfg = AlgoConfig {
        seed: 1,
        stagnation: usize::MAX, // full 200 iterations, no early stop
        ..scenario.optimizer
    };
    let started = Instant::now();
    let result = optimizer::run(Algorithm::CrBpso, &scenario, &cfg);
    let elapsed = started.elapsed();
    assert_eq!(result.iterations_run, 200);
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "default crBPSO run took {elapsed:.2?}"
    );
    println!("criterion 8: PASS — full 200-iteration crBPSO run in {elapsed:.2?}");
}
