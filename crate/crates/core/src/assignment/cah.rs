//! Restarted three-stage local search: randomised greedy construction,
//! single-ECU exchange descent, then a pairwise swap pass on the best result.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{criterion_value, Channel, ChannelAssignment, CriterionParams, Problem, State};
use crate::hypergraph::Hypergraph;

fn greedy(state: &mut State<'_>, list: &[usize], params: &CriterionParams) {
    for &v in list {
        let ca = criterion_value(state.payloads_after_assign(v, Channel::A), params);
        let cb = criterion_value(state.payloads_after_assign(v, Channel::B), params);
        let ch = if ca < cb {
            Channel::A
        } else if cb < ca {
            Channel::B
        } else {
            let p = state.payloads();
            if p.a <= p.b {
                Channel::A
            } else {
                Channel::B
            }
        };
        state.assign(v, ch);
    }
}

/// Flips single ECUs while a flip strictly lowers the criterion.
fn exchange(state: &mut State<'_>, params: &CriterionParams) -> f64 {
    let mut current = criterion_value(state.payloads(), params);
    let mut changed = true;
    while changed {
        changed = false;
        for v in 0..state.side.len() {
            let candidate = criterion_value(state.payloads_after_flip(v), params);
            if candidate < current {
                state.flip(v);
                current = candidate;
                changed = true;
            }
        }
    }
    current
}

/// One pass over all (A, B) pairs, swapping a pair whenever that helps.
fn two_opt(state: &mut State<'_>, params: &CriterionParams) {
    let n = state.side.len();
    let mut current = criterion_value(state.payloads(), params);
    for i in 0..n {
        for j in 0..n {
            if state.side[i] != Some(Channel::A) || state.side[j] != Some(Channel::B) {
                continue;
            }
            let candidate = criterion_value(state.payloads_after_swap(i, j), params);
            if candidate < current {
                state.flip(i);
                state.flip(j);
                current = candidate;
            }
        }
    }
}

pub fn solve_cah(hg: &Hypergraph, params: &CriterionParams, tries_count: u32, rng_seed: u64) -> ChannelAssignment {
    let problem = Problem::new(hg);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut list: Vec<usize> = (0..problem.len()).collect();

    let mut best: Option<(f64, Vec<Option<Channel>>)> = None;
    for _ in 0..tries_count.max(1) {
        list.shuffle(&mut rng);
        let mut state = State::new(&problem);
        greedy(&mut state, &list, params);
        let value = exchange(&mut state, params);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, state.side));
        }
    }

    let (_, sides) = best.expect("at least one restart");
    let mut state = State::new(&problem);
    for (v, side) in sides.iter().enumerate() {
        state.assign(v, side.unwrap_or(Channel::A));
    }
    two_opt(&mut state, params);
    problem.to_assignment(&state.side, params, false)
}
