//! Depth-first branch-and-bound over the binary channel variables.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{criterion_value, Channel, ChannelAssignment, CriterionParams, Problem, State};
use crate::hypergraph::Hypergraph;
use crate::model::EcuId;

const BUDGET_CHECK_INTERVAL: u64 = 1024;

/// Lower bound of `max(beta * a, b)` when `free` more bytes must still be
/// split between the channels, each byte landing on at least one side.
fn balanced_split(beta: f64, a: f64, b: f64, free: f64) -> f64 {
    if beta * a >= b + free {
        beta * a
    } else if b >= beta * (a + free) {
        b
    } else {
        let x = (b + free - beta * a) / (1.0 + beta);
        b + free - x
    }
}

fn state_bound(state: &State<'_>, params: &CriterionParams) -> f64 {
    let p = state.payloads();
    let free = state.untouched_weight();
    if free == 0 {
        return criterion_value(p, params);
    }
    balanced_split(params.beta, p.a as f64, p.b as f64, free as f64) + params.alpha * p.gw as f64
}

/// Admissible bound on the criterion of every completion of `partial`.
///
/// Edges already touching a channel count toward it in full; the weight of
/// untouched edges is split fractionally to balance the two channels.
pub fn lower_bound(hg: &Hypergraph, partial: &BTreeMap<EcuId, Channel>, params: &CriterionParams) -> f64 {
    let problem = Problem::new(hg);
    let mut state = State::new(&problem);
    for (v, ecu) in problem.ecus.iter().enumerate() {
        if let Some(ch) = partial.get(ecu) {
            state.assign(v, *ch);
        }
    }
    state_bound(&state, params)
}

struct Search<'p, F> {
    order: Vec<usize>,
    params: CriterionParams,
    pinned: bool,
    state: State<'p>,
    best: f64,
    best_sides: Vec<Option<Channel>>,
    nodes: u64,
    stop: F,
    aborted: bool,
}

impl<F: FnMut() -> bool> Search<'_, F> {
    fn dfs(&mut self, depth: usize) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(BUDGET_CHECK_INTERVAL) && (self.stop)() {
            self.aborted = true;
            return;
        }
        if depth == self.order.len() {
            let value = criterion_value(self.state.payloads(), &self.params);
            if value < self.best {
                self.best = value;
                self.best_sides.clone_from(&self.state.side);
            }
            return;
        }
        let v = self.order[depth];
        let mut children: Vec<(f64, Channel)> = Vec::with_capacity(2);
        let channels: &[Channel] = if depth == 0 && self.pinned { &[Channel::A] } else { &Channel::BOTH };
        for &ch in channels {
            self.state.assign(v, ch);
            children.push((state_bound(&self.state, &self.params), ch));
            self.state.unassign(v);
        }
        children.sort_by(|x, y| x.0.total_cmp(&y.0));
        for (bound, ch) in children {
            if bound >= self.best {
                continue;
            }
            self.state.assign(v, ch);
            self.dfs(depth + 1);
            self.state.unassign(v);
        }
    }
}

/// Greedy construction in branching order, used as the first incumbent.
fn greedy_incumbent(problem: &Problem, order: &[usize], params: &CriterionParams, pinned: bool) -> Vec<Option<Channel>> {
    let mut state = State::new(problem);
    for (k, &v) in order.iter().enumerate() {
        if k == 0 && pinned {
            state.assign(v, Channel::A);
            continue;
        }
        let ca = criterion_value(state.payloads_after_assign(v, Channel::A), params);
        let cb = criterion_value(state.payloads_after_assign(v, Channel::B), params);
        state.assign(v, if cb < ca { Channel::B } else { Channel::A });
    }
    state.side
}

/// Exact solver with a caller-supplied stop predicate, polled every
/// [`BUDGET_CHECK_INTERVAL`] nodes. When it fires the incumbent is returned
/// with `optimal == false`.
///
/// With `beta == 1` the criterion is invariant under swapping the channels,
/// so the first ECU of the branching order is pinned to channel A.
pub fn solve_exact_with<F: FnMut() -> bool>(hg: &Hypergraph, params: &CriterionParams, stop: F) -> ChannelAssignment {
    let problem = Problem::new(hg);
    let order = problem.branching_order();
    let pinned = params.is_symmetric() && !order.is_empty();

    let start = greedy_incumbent(&problem, &order, params, pinned);
    let start_value = {
        let mut s = State::new(&problem);
        for (v, side) in start.iter().enumerate() {
            s.assign(v, side.unwrap_or(Channel::A));
        }
        criterion_value(s.payloads(), params)
    };

    let mut search = Search {
        order,
        params: *params,
        pinned,
        state: State::new(&problem),
        best: start_value,
        best_sides: start,
        nodes: 0,
        stop,
        aborted: false,
    };
    search.dfs(0);

    let optimal = !search.aborted;
    problem.to_assignment(&search.best_sides, params, optimal)
}

pub fn solve_exact(hg: &Hypergraph, params: &CriterionParams) -> ChannelAssignment {
    solve_exact_with(hg, params, || false)
}

#[cfg(test)]
mod tests {
    use super::super::tests::arb_hypergraph;
    use super::super::testkit::*;
    use super::super::evaluate_criterion;
    use super::*;
    use crate::hypergraph::{build_hypergraph, Hyperedge};
    use crate::model::fixtures::example_one;
    use proptest::prelude::*;

    #[test]
    fn example_one_optimum() {
        let hg = build_hypergraph(&example_one());
        let params = CriterionParams::new(1.0 / 52.0, 1.0).unwrap();
        let asg = solve_exact(&hg, &params);
        assert!(asg.optimal);
        assert!((asg.criterion - (40.0 + 20.0 / 52.0)).abs() < 1e-9);
        let ch = |e| asg.channel_of[&EcuId(e)];
        assert_eq!(ch(3), ch(4));
        assert_ne!(ch(5), ch(4));
        // ECU 4 leads the branching order and is pinned
        assert_eq!(ch(4), Channel::A);
    }

    #[test]
    fn single_self_loop() {
        let hg = Hypergraph {
            edges: alloc::vec![Hyperedge {
                endpoints: alloc::vec![EcuId(1)],
                free_endpoints: alloc::vec![EcuId(1)],
                weight_bytes: 7,
                member_signals: Vec::new(),
            }],
            free_ecus: alloc::vec![EcuId(1)],
            ft_weight_bytes: 3,
        };
        let asg = solve_exact(&hg, &CriterionParams::new(0.0, 1.0).unwrap());
        assert_eq!(asg.channel_of[&EcuId(1)], Channel::A);
        assert_eq!(asg.criterion, 10.0);
    }

    #[test]
    fn stop_predicate_returns_incumbent() {
        let mut hg = Hypergraph::default();
        for i in 0..18u32 {
            hg.free_ecus.push(EcuId(i));
            hg.edges.push(Hyperedge {
                endpoints: alloc::vec![EcuId(i)],
                free_endpoints: alloc::vec![EcuId(i)],
                weight_bytes: u64::from(1 + i * 7 % 11),
                member_signals: Vec::new(),
            });
        }
        let params = CriterionParams::new(0.0, 1.0).unwrap();
        let asg = solve_exact_with(&hg, &params, || true);
        let (_, c) = evaluate_criterion(&hg, &asg.channel_of, &params).unwrap();
        assert_eq!(c, asg.criterion);
        let full = solve_exact(&hg, &params);
        assert!(full.optimal);
        assert!(full.criterion <= asg.criterion);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn equals_exhaustive_minimum(hg in arb_hypergraph(10, 20), beta in prop::sample::select(alloc::vec![1.0, 0.5, 1.7])) {
            let params = CriterionParams::new(0.013, beta).unwrap();
            let asg = solve_exact(&hg, &params);
            let (best, _) = brute_minimum(&hg, &params);
            prop_assert!(asg.optimal);
            prop_assert_eq!(asg.criterion, best);
        }

        #[test]
        fn bound_is_admissible(hg in arb_hypergraph(9, 14), partial_mask in any::<u64>(), known in any::<u64>(), beta in 0.3f64..3.0) {
            let params = CriterionParams::new(0.02, beta).unwrap();
            let n = hg.free_ecus.len();
            let partial: BTreeMap<EcuId, Channel> = hg.free_ecus.iter().enumerate()
                .filter(|(i, _)| known >> i & 1 == 1)
                .map(|(i, e)| (*e, if partial_mask >> i & 1 == 1 { Channel::A } else { Channel::B }))
                .collect();
            let bound = lower_bound(&hg, &partial, &params);
            for mask in 0u64..(1 << n) {
                let full = map_from_mask(&hg, mask);
                if partial.iter().any(|(e, c)| full[e] != *c) {
                    continue;
                }
                let value = brute_value(brute_payloads(&hg, &|e| full[&e] == Channel::A), &params);
                prop_assert!(bound <= value + 1e-9, "bound {} > completion {}", bound, value);
            }
        }
    }
}
