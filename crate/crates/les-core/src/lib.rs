//! Deterministic simulator of a grid-connected local energy system —
//! quantized smart-home load packets, rooftop PV, per-home battery storage
//! and supply/demand-ratio internal pricing — together with the
//! population-based schedule optimizers (GA, BPSO, crBPSO) that solve the
//! joint packet-scheduling problem, a brute-force oracle for tiny
//! instances, and a master–slave agent harness that replays the optimized
//! plan slot by slot.
//!
//! Conventions used throughout: energies are kWh, prices are cents/kWh,
//! costs are cents, time is a slot index in `0..horizon`.

pub mod costs;
pub mod fixtures;
pub mod mas;
pub mod model;
pub mod optimizer;
pub mod oracle;
pub mod pricing;
pub mod scenario;
pub mod schedule;
pub mod storage;

pub use costs::{CostBreakdown, EvaluationTrace, ObjectiveWeights, SlotDispatch};
pub use mas::{ActionPlan, AgentId, AgentKind, EpisodeLog, MasSystem, StatusReport};
pub use optimizer::{AlgoConfig, Algorithm, OptimizationResult};
pub use oracle::TinyScenarioBound;
pub use pricing::{GridTariff, PriceQuote};
pub use scenario::{HomeProfile, LoadSpec, PvSpec, Scenario, ScenarioError, WeatherSeries};
pub use schedule::ScheduleMatrix;
pub use storage::{EssSpec, EssState};
