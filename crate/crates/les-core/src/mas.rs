//! Hierarchical master–slave agent layer: load and PV agents report their
//! status, the storage and service-provider agents report state and
//! tariffs, and the utility-agent master runs the optimizer once over the
//! horizon (day-ahead) and re-slices the best candidate into per-agent
//! action plans. An episode replays the plan slot by slot and logs every
//! message.
//!
//! Agents are in-process state machines exchanging typed messages in a
//! deterministic order — the architecture is logical, not a wire protocol.

use serde::Serialize;
use thiserror::Error;

use crate::costs::{self, CostBreakdown, EvaluationTrace, SlotDispatch};
use crate::optimizer::{self, AlgoConfig, Algorithm, OptimizationResult};
use crate::scenario::Scenario;
use crate::schedule::ScheduleMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum MasError {
    #[error("slot {slot} outside horizon {horizon}")]
    SlotOutOfRange { slot: usize, horizon: usize },
    #[error("agent {0:?} is not registered")]
    UnregisteredAgent(AgentId),
    #[error("status reports incomplete: expected {expected}, got {got}")]
    IncompleteReports { expected: usize, got: usize },
}

/// Agent taxonomy: reflex agents for loads and PV, model-based agents for
/// the battery fleet and the energy service provider, one utility agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    SraLoad,
    SraPv,
    MraEss,
    MraEsp,
    Ua,
}

/// Identity of one agent. Load agents carry (home, load), PV agents carry
/// the home, the fleet-level agents carry neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AgentId {
    pub kind: AgentKind,
    pub home: Option<usize>,
    pub load: Option<usize>,
}

impl AgentId {
    pub fn load_agent(home: usize, load: usize) -> Self {
        Self {
            kind: AgentKind::SraLoad,
            home: Some(home),
            load: Some(load),
        }
    }

    pub fn pv_agent(home: usize) -> Self {
        Self {
            kind: AgentKind::SraPv,
            home: Some(home),
            load: None,
        }
    }

    pub fn ess_agent() -> Self {
        Self {
            kind: AgentKind::MraEss,
            home: None,
            load: None,
        }
    }

    pub fn esp_agent() -> Self {
        Self {
            kind: AgentKind::MraEsp,
            home: None,
            load: None,
        }
    }

    pub fn ua() -> Self {
        Self {
            kind: AgentKind::Ua,
            home: None,
            load: None,
        }
    }
}

/// What a slave tells the master about the current slot.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportPayload {
    /// Pending packet demand and admissible start window of one load.
    DemandRequest {
        packets_pending: usize,
        request_slot: usize,
        latest_start: usize,
    },
    /// Remaining-horizon PV forecast of one home, kWh per slot.
    PvForecast { series: Vec<f64> },
    /// Current battery level of every home, kWh.
    EssLevels { levels: Vec<f64> },
    /// Grid tariff quoted for this slot, cents/kWh.
    TariffQuote { grid_buy: f64, grid_sell: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatusReport {
    pub agent: AgentId,
    pub slot: usize,
    pub payload: ReportPayload,
}

/// The master's instruction to one slave for the remaining horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanBody {
    /// Full-horizon packet placement for one load.
    LoadSchedule { slots: Vec<bool> },
    /// Planned routing of one home's PV: to loads, to battery, exported.
    PvDispatch {
        to_loads: Vec<f64>,
        to_ess: Vec<f64>,
        export: Vec<f64>,
    },
    /// Fleet charge/discharge commands, `[home][slot]` kWh.
    EssFlows {
        charge: Vec<Vec<f64>>,
        discharge: Vec<Vec<f64>>,
    },
    /// Aggregate grid trade per slot, kWh.
    EspFlows { buy: Vec<f64>, sell: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActionPlan {
    pub agent: AgentId,
    pub body: PlanBody,
}

/// Observable system state a status collection runs against.
#[derive(Debug, Clone)]
pub struct SystemSnapshot {
    /// Packets already delivered per (home, load).
    pub delivered: Vec<Vec<usize>>,
    /// Battery level per home, kWh.
    pub ess_levels: Vec<f64>,
}

impl SystemSnapshot {
    /// State before anything has run: nothing delivered, batteries at
    /// their initial level.
    pub fn initial(scenario: &Scenario) -> Self {
        Self {
            delivered: scenario
                .homes
                .iter()
                .map(|h| vec![0usize; h.loads.len()])
                .collect(),
            ess_levels: vec![scenario.ess.initial_level; scenario.num_homes()],
        }
    }
}

/// Registry of the system's agents around one scenario.
#[derive(Debug, Clone)]
pub struct MasSystem {
    scenario: Scenario,
    slaves: Vec<AgentId>,
}

impl MasSystem {
    pub fn new(scenario: Scenario) -> Self {
        let mut slaves = Vec::new();
        for (b, home) in scenario.homes.iter().enumerate() {
            for l in 0..home.loads.len() {
                slaves.push(AgentId::load_agent(b, l));
            }
        }
        for b in 0..scenario.num_homes() {
            slaves.push(AgentId::pv_agent(b));
        }
        slaves.push(AgentId::ess_agent());
        slaves.push(AgentId::esp_agent());
        slaves.sort();
        Self { scenario, slaves }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// Registered slave agents in their deterministic (sorted) order.
    pub fn slaves(&self) -> &[AgentId] {
        &self.slaves
    }

    /// One status report per requested agent, sorted by agent id.
    pub fn collect_status(
        &self,
        agents: &[AgentId],
        slot: usize,
        snapshot: &SystemSnapshot,
    ) -> Result<Vec<StatusReport>, MasError> {
        if slot >= self.scenario.horizon {
            return Err(MasError::SlotOutOfRange {
                slot,
                horizon: self.scenario.horizon,
            });
        }
        let mut sorted: Vec<AgentId> = agents.to_vec();
        sorted.sort();
        let pv_series = self.scenario.pv_series();
        sorted
            .into_iter()
            .map(|agent| {
                if self.slaves.binary_search(&agent).is_err() {
                    return Err(MasError::UnregisteredAgent(agent));
                }
                let payload = match agent.kind {
                    AgentKind::SraLoad => {
                        let (b, l) = (agent.home.unwrap(), agent.load.unwrap());
                        let load = self.scenario.load(b, l);
                        ReportPayload::DemandRequest {
                            packets_pending: load
                                .packets_required
                                .saturating_sub(snapshot.delivered[b][l]),
                            request_slot: load.request_slot,
                            latest_start: load.latest_start,
                        }
                    }
                    AgentKind::SraPv => ReportPayload::PvForecast {
                        series: pv_series[slot..].to_vec(),
                    },
                    AgentKind::MraEss => ReportPayload::EssLevels {
                        levels: snapshot.ess_levels.clone(),
                    },
                    AgentKind::MraEsp => ReportPayload::TariffQuote {
                        grid_buy: self.scenario.tariff.grid_buy[slot],
                        grid_sell: self.scenario.tariff.grid_sell[slot],
                    },
                    AgentKind::Ua => return Err(MasError::UnregisteredAgent(agent)),
                };
                Ok(StatusReport {
                    agent,
                    slot,
                    payload,
                })
            })
            .collect()
    }
}

/// Slice an optimized schedule and its dispatch trace into one action plan
/// per slave.
fn plans_from_result(
    system: &MasSystem,
    schedule: &ScheduleMatrix,
    trace: &EvaluationTrace,
) -> Vec<ActionPlan> {
    let scn = system.scenario();
    let horizon = scn.horizon;
    let mut plans = Vec::with_capacity(system.slaves().len());
    for &agent in system.slaves() {
        let body = match agent.kind {
            AgentKind::SraLoad => PlanBody::LoadSchedule {
                slots: schedule
                    .stripe(agent.home.unwrap(), agent.load.unwrap())
                    .to_vec(),
            },
            AgentKind::SraPv => {
                let b = agent.home.unwrap();
                let d = &trace.dispatches[b];
                PlanBody::PvDispatch {
                    to_loads: d.iter().map(|s| s.pv_to_loads).collect(),
                    to_ess: d.iter().map(|s| s.pv_to_ess).collect(),
                    export: d.iter().map(|s| s.grid_sell_energy).collect(),
                }
            }
            AgentKind::MraEss => PlanBody::EssFlows {
                charge: trace
                    .dispatches
                    .iter()
                    .map(|home| home.iter().map(|s| s.pv_to_ess + s.grid_to_ess).collect())
                    .collect(),
                discharge: trace
                    .dispatches
                    .iter()
                    .map(|home| home.iter().map(|s| s.ess_discharge).collect())
                    .collect(),
            },
            AgentKind::MraEsp => PlanBody::EspFlows {
                buy: (0..horizon)
                    .map(|t| trace.dispatches.iter().map(|h| h[t].grid_buy_total()).sum())
                    .collect(),
                sell: (0..horizon)
                    .map(|t| {
                        trace
                            .dispatches
                            .iter()
                            .map(|h| h[t].grid_sell_energy)
                            .sum()
                    })
                    .collect(),
            },
            AgentKind::Ua => continue,
        };
        plans.push(ActionPlan { agent, body });
    }
    plans
}

/// The utility agent's planning round: run the optimizer over the horizon
/// and slice the best candidate into per-agent plans. The report set must
/// contain one report per registered slave.
pub fn master_plan(
    system: &MasSystem,
    reports: &[StatusReport],
    algorithm: Algorithm,
    cfg: &AlgoConfig,
) -> Result<(Vec<ActionPlan>, OptimizationResult), MasError> {
    if reports.len() != system.slaves().len() {
        return Err(MasError::IncompleteReports {
            expected: system.slaves().len(),
            got: reports.len(),
        });
    }
    let result = optimizer::run(algorithm, system.scenario(), cfg);
    let (_, trace) =
        costs::evaluate_detailed(&result.best_schedule, system.scenario()).expect("dims match");
    Ok((plans_from_result(system, &result.best_schedule, &trace), result))
}

/// Per-slot costs realized by the dispatch, cents, normalized by the
/// number of prosumers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlotCosts {
    pub transaction_cost: f64,
    pub degradation_cost: f64,
}

/// One slot of the episode log. Serialized as one JSON Lines record.
#[derive(Debug, Clone, Serialize)]
pub struct SlotRecord {
    pub slot: usize,
    pub reports: Vec<StatusReport>,
    pub plans: Vec<ActionPlan>,
    pub dispatch: Vec<SlotDispatch>,
    pub ess_level: Vec<f64>,
    pub slot_costs: SlotCosts,
}

/// Full deterministic record of one simulated day.
#[derive(Debug, Clone)]
pub struct EpisodeLog {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub records: Vec<SlotRecord>,
    pub realized_schedule: ScheduleMatrix,
    pub breakdown: CostBreakdown,
    pub result: OptimizationResult,
}

impl EpisodeLog {
    /// JSON Lines serialization: one record per slot.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in &self.records {
            out.push_str(&serde_json::to_string(record).expect("serializable record"));
            out.push('\n');
        }
        out
    }
}

/// Simulate one day: plan at slot 0 (and, when `replan` is set, again
/// before every later slot with the past frozen), then replay the plan
/// through the dispatch pipeline, logging reports, plans, flows, battery
/// levels and costs per slot. The logged costs are exactly the evaluation
/// of the realized schedule.
pub fn run_episode(
    scenario: &Scenario,
    algorithm: Algorithm,
    cfg: &AlgoConfig,
    replan: bool,
) -> Result<EpisodeLog, MasError> {
    let system = MasSystem::new(scenario.clone());
    let horizon = scenario.horizon;

    // Day-ahead planning round.
    let initial_reports =
        system.collect_status(system.slaves(), 0, &SystemSnapshot::initial(scenario))?;
    let (initial_plans, result) = master_plan(&system, &initial_reports, algorithm, cfg)?;

    let mut realized = result.best_schedule.clone();
    let mut plans_per_slot: Vec<Vec<ActionPlan>> = vec![Vec::new(); horizon];
    plans_per_slot[0] = initial_plans;

    if replan {
        for (t, slot_plans) in plans_per_slot.iter_mut().enumerate().skip(1) {
            let cfg_t = AlgoConfig {
                seed: cfg.seed.wrapping_add(t as u64),
                ..*cfg
            };
            let result_t =
                optimizer::run_from(algorithm, scenario, &cfg_t, Some(&realized), t);
            realized = result_t.best_schedule;
            let (_, trace_t) =
                costs::evaluate_detailed(&realized, scenario).expect("dims match");
            *slot_plans = plans_from_result(&system, &realized, &trace_t);
        }
    }

    let (breakdown, trace) = costs::evaluate_detailed(&realized, scenario).expect("dims match");

    let mut records = Vec::with_capacity(horizon);
    let mut snapshot = SystemSnapshot::initial(scenario);
    for t in 0..horizon {
        let reports = system.collect_status(system.slaves(), t, &snapshot)?;
        let dispatch: Vec<SlotDispatch> =
            trace.dispatches.iter().map(|home| home[t]).collect();
        let ess_level: Vec<f64> = trace.ess_levels.iter().map(|home| home[t]).collect();
        records.push(SlotRecord {
            slot: t,
            reports,
            plans: std::mem::take(&mut plans_per_slot[t]),
            dispatch,
            ess_level,
            slot_costs: SlotCosts {
                transaction_cost: trace.slot_transaction[t],
                degradation_cost: trace.slot_degradation[t],
            },
        });
        // advance the observable state for the next collection
        for (b, home) in scenario.homes.iter().enumerate() {
            for l in 0..home.loads.len() {
                if realized.get(b, l, t) {
                    snapshot.delivered[b][l] += 1;
                }
            }
            snapshot.ess_levels[b] = trace.ess_levels[b][t];
        }
    }

    Ok(EpisodeLog {
        algorithm,
        seed: cfg.seed,
        records,
        realized_schedule: realized,
        breakdown,
        result,
    })
}
