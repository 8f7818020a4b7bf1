//! Iterative assignment and scheduling with channel rebalancing.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::assignment::{solve_cah, solve_exact, solve_ga, AssignmentError, Channel, ChannelAssignment, CriterionParams};
use crate::hypergraph::{build_hypergraph, Hypergraph};
use crate::model::{EcuId, Instance};
use crate::scheduler::{schedule_channels, Schedule, ScheduleError, ScheduleStats};

pub const BETA_MIN: f64 = 0.125;
pub const BETA_MAX: f64 = 8.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum SolverKind {
    Exact,
    Cah,
    Ga,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriverConfig {
    /// `None` selects `1 / sum of payloads`.
    pub alpha: Option<f64>,
    pub max_iterations: u32,
    pub solver: SolverKind,
    pub cah_tries: u32,
    pub rng_seed: u64,
}

impl Default for DriverConfig {
    fn default() -> Self {
        Self {
            alpha: None,
            max_iterations: 10,
            solver: SolverKind::Cah,
            cah_tries: 1000,
            rng_seed: 0,
        }
    }
}

/// Assignment step of the loop. `iteration` starts at 1.
pub trait AssignmentSolver {
    fn assign(&mut self, hg: &Hypergraph, params: &CriterionParams, iteration: u32) -> ChannelAssignment;
}

/// The in-crate solvers selected by [`SolverKind`]. The exact solver runs
/// without a time budget.
#[derive(Clone, Copy, Debug)]
pub struct BuiltinSolver {
    pub kind: SolverKind,
    pub cah_tries: u32,
    pub rng_seed: u64,
}

impl AssignmentSolver for BuiltinSolver {
    fn assign(&mut self, hg: &Hypergraph, params: &CriterionParams, iteration: u32) -> ChannelAssignment {
        let seed = self.rng_seed.wrapping_add(u64::from(iteration - 1));
        match self.kind {
            SolverKind::Exact => solve_exact(hg, params),
            SolverKind::Cah => solve_cah(hg, params, self.cah_tries, seed),
            SolverKind::Ga => solve_ga(hg, params, seed),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct IterationRecord {
    pub iteration: u32,
    pub beta: f64,
    pub criterion: f64,
    pub slots_a: u32,
    pub slots_b: u32,
    pub gw_slots: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum StopReason {
    IterationLimit,
    Cycling,
    /// Neither channel uses a slot.
    EmptySchedule,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DriverOutcome {
    pub schedule: Schedule,
    pub assignment: ChannelAssignment,
    pub best_iteration: u32,
    /// Statistics of the first iteration's schedule.
    pub first: ScheduleStats,
    /// One record per scheduled iteration.
    pub log: Vec<IterationRecord>,
    pub stop: StopReason,
}

impl DriverOutcome {
    pub fn best(&self) -> ScheduleStats {
        self.schedule.stats()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DriverError {
    #[error("max_iterations must be at least 1")]
    NoIterations,
    #[error(transparent)]
    Params(#[from] AssignmentError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// Lexicographic quality of a schedule; lower is better.
pub fn schedule_key(stats: &ScheduleStats) -> (u32, u32, u32) {
    (stats.max_slot(), stats.gateway_slots, stats.frames)
}

/// `sqrt(slots_a / slots_b)` clamped to `[BETA_MIN, BETA_MAX]`; an empty
/// channel B counts as one slot. `None` when both channels are empty.
pub fn next_beta(slots_a: u32, slots_b: u32) -> Option<f64> {
    if slots_a == 0 && slots_b == 0 {
        return None;
    }
    let ratio = f64::from(slots_a) / f64::from(slots_b.max(1));
    Some(libm::sqrt(ratio).clamp(BETA_MIN, BETA_MAX))
}

pub fn run(inst: &Instance, cfg: &DriverConfig) -> Result<DriverOutcome, DriverError> {
    let mut solver = BuiltinSolver {
        kind: cfg.solver,
        cah_tries: cfg.cah_tries,
        rng_seed: cfg.rng_seed,
    };
    run_with(inst, cfg, &mut solver)
}

pub fn run_with(
    inst: &Instance,
    cfg: &DriverConfig,
    solver: &mut dyn AssignmentSolver,
) -> Result<DriverOutcome, DriverError> {
    if cfg.max_iterations == 0 {
        return Err(DriverError::NoIterations);
    }
    let hg = build_hypergraph(inst);
    let alpha = cfg.alpha.unwrap_or_else(|| CriterionParams::default_alpha(inst));
    let mut beta = 1.0;
    let mut seen: BTreeSet<BTreeMap<EcuId, Channel>> = BTreeSet::new();
    let mut log = Vec::new();
    let mut best: Option<(Schedule, ChannelAssignment, u32)> = None;
    let mut first = ScheduleStats::default();
    let mut stop = StopReason::IterationLimit;

    for iteration in 1..=cfg.max_iterations {
        let params = CriterionParams::new(alpha, beta)?;
        let asg = solver.assign(&hg, &params, iteration);
        if !seen.insert(asg.channel_of.clone()) {
            stop = StopReason::Cycling;
            break;
        }
        let schedule = schedule_channels(inst, &asg)?;
        let stats = schedule.stats();
        log.push(IterationRecord {
            iteration,
            beta,
            criterion: asg.criterion,
            slots_a: stats.max_slot_a,
            slots_b: stats.max_slot_b,
            gw_slots: stats.gateway_slots,
        });
        if iteration == 1 {
            first = stats;
        }
        let better = match &best {
            None => true,
            Some((b, _, _)) => schedule_key(&stats) < schedule_key(&b.stats()),
        };
        if better {
            best = Some((schedule, asg, iteration));
        }
        match next_beta(stats.max_slot_a, stats.max_slot_b) {
            Some(b) => beta = b,
            None => {
                stop = StopReason::EmptySchedule;
                break;
            }
        }
    }

    let (schedule, assignment, best_iteration) = best.expect("first iteration always schedules");
    Ok(DriverOutcome {
        schedule,
        assignment,
        best_iteration,
        first,
        log,
        stop,
    })
}
