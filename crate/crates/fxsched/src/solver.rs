//! Assignment solvers with a wall-clock budget for the exact search.

use std::time::{Duration, Instant};

use fxsched_core::assignment::{solve_cah, solve_exact_with, solve_ga};
use fxsched_core::driver::{AssignmentSolver, SolverKind};
use fxsched_core::{ChannelAssignment, CriterionParams, Hypergraph};

/// Branch and bound that returns its incumbent once `budget` has elapsed;
/// `optimal` is then false.
pub fn solve_exact_timed(hg: &Hypergraph, params: &CriterionParams, budget: Duration) -> ChannelAssignment {
    let start = Instant::now();
    solve_exact_with(hg, params, || start.elapsed() >= budget)
}

#[derive(Clone, Copy, Debug)]
pub struct Solver {
    pub kind: SolverKind,
    pub cah_tries: u32,
    pub rng_seed: u64,
    pub exact_budget: Duration,
}

impl AssignmentSolver for Solver {
    fn assign(&mut self, hg: &Hypergraph, params: &CriterionParams, iteration: u32) -> ChannelAssignment {
        let seed = self.rng_seed.wrapping_add(u64::from(iteration - 1));
        match self.kind {
            SolverKind::Exact => solve_exact_timed(hg, params, self.exact_budget),
            SolverKind::Cah => solve_cah(hg, params, self.cah_tries, seed),
            SolverKind::Ga => solve_ga(hg, params, seed),
        }
    }
}
