//! ECU-to-channel assignment.
//!
//! Every one-port ECU is connected to channel A or B. A hyperedge whose free
//! endpoints all sit on one channel is carried by that channel only; an edge
//! spanning both channels is carried by both and crosses the gateway. The
//! solvers minimise `max(beta * P_A, P_B) + alpha * P_G`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::hypergraph::Hypergraph;
use crate::model::{EcuId, Instance};

mod cah;
mod exact;
mod ga;
pub mod lp;

pub use cah::solve_cah;
pub use exact::{lower_bound, solve_exact, solve_exact_with};
pub use ga::{solve_ga, solve_ga_with, GaConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum Channel {
    A,
    B,
}

impl Channel {
    pub const BOTH: [Channel; 2] = [Channel::A, Channel::B];

    pub fn other(self) -> Channel {
        match self {
            Channel::A => Channel::B,
            Channel::B => Channel::A,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl core::fmt::Display for Channel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Channel::A => "A",
            Channel::B => "B",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct CriterionParams {
    /// Weight of the gateway throughput.
    pub alpha: f64,
    /// Weight balancing channel A against channel B.
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AssignmentError {
    #[error("criterion weights out of range: alpha = {alpha}, beta = {beta}")]
    Params { alpha: f64, beta: f64 },
    #[error("no channel given for free ECU {0}")]
    Missing(EcuId),
}

impl CriterionParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, AssignmentError> {
        if alpha >= 0.0 && alpha.is_finite() && beta > 0.0 && beta.is_finite() {
            Ok(Self { alpha, beta })
        } else {
            Err(AssignmentError::Params { alpha, beta })
        }
    }

    /// `1 / sum of all payloads`: among assignments with equal channel load
    /// the one with lower gateway traffic wins.
    pub fn default_alpha(inst: &Instance) -> f64 {
        match inst.total_payload_bytes() {
            0 => 0.0,
            total => 1.0 / total as f64,
        }
    }

    pub fn for_instance(inst: &Instance) -> Self {
        Self {
            alpha: Self::default_alpha(inst),
            beta: 1.0,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.beta == 1.0
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Payloads {
    pub a: u64,
    pub b: u64,
    pub gw: u64,
}

pub fn criterion_value(p: Payloads, params: &CriterionParams) -> f64 {
    f64::max(params.beta * p.a as f64, p.b as f64) + params.alpha * p.gw as f64
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ChannelAssignment {
    pub channel_of: BTreeMap<EcuId, Channel>,
    #[cfg_attr(feature = "serde", serde(rename = "P_A"))]
    pub payload_a: u64,
    #[cfg_attr(feature = "serde", serde(rename = "P_B"))]
    pub payload_b: u64,
    #[cfg_attr(feature = "serde", serde(rename = "P_G"))]
    pub payload_gw: u64,
    pub criterion: f64,
    /// Set only when the exact search finished within its budget.
    pub optimal: bool,
}

impl ChannelAssignment {
    pub fn payloads(&self) -> Payloads {
        Payloads {
            a: self.payload_a,
            b: self.payload_b,
            gw: self.payload_gw,
        }
    }
}

/// Evaluates a complete channel map from scratch.
pub fn evaluate_criterion(
    hg: &Hypergraph,
    channel_of: &BTreeMap<EcuId, Channel>,
    params: &CriterionParams,
) -> Result<(Payloads, f64), AssignmentError> {
    let problem = Problem::new(hg);
    let mut state = State::new(&problem);
    for (v, ecu) in problem.ecus.iter().enumerate() {
        let ch = channel_of.get(ecu).ok_or(AssignmentError::Missing(*ecu))?;
        state.assign(v, *ch);
    }
    let p = state.payloads();
    Ok((p, criterion_value(p, params)))
}

#[derive(Clone, Debug)]
pub(crate) struct Edge {
    pub ends: Vec<usize>,
    pub weight: u64,
}

/// Index-based view of a hypergraph: free ECUs become variables `0..n`.
/// Edges without free endpoints never change the criterion and are dropped.
#[derive(Clone, Debug)]
pub(crate) struct Problem {
    pub ecus: Vec<EcuId>,
    pub edges: Vec<Edge>,
    pub incident: Vec<Vec<usize>>,
    pub ft_weight: u64,
}

impl Problem {
    pub fn new(hg: &Hypergraph) -> Self {
        let mut ecus = hg.free_ecus.clone();
        for e in &hg.edges {
            for v in &e.free_endpoints {
                if !ecus.contains(v) {
                    ecus.push(*v);
                }
            }
        }
        let index: BTreeMap<EcuId, usize> = ecus.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let mut incident = alloc::vec![Vec::new(); ecus.len()];
        let mut edges = Vec::new();
        for e in hg.edges.iter().filter(|e| !e.free_endpoints.is_empty()) {
            let mut ends: Vec<usize> = e.free_endpoints.iter().map(|v| index[v]).collect();
            ends.sort_unstable();
            ends.dedup();
            for &v in &ends {
                incident[v].push(edges.len());
            }
            edges.push(Edge {
                ends,
                weight: e.weight_bytes,
            });
        }
        Self {
            ecus,
            edges,
            incident,
            ft_weight: hg.ft_weight_bytes,
        }
    }

    pub fn len(&self) -> usize {
        self.ecus.len()
    }

    pub fn incident_weight(&self, v: usize) -> u64 {
        self.incident[v].iter().map(|&e| self.edges[e].weight).sum()
    }

    /// Most heavily connected ECUs first; ties by ECU id.
    pub fn branching_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&x, &y| {
            self.incident_weight(y)
                .cmp(&self.incident_weight(x))
                .then(self.ecus[x].cmp(&self.ecus[y]))
        });
        order
    }

    pub fn to_assignment(
        &self,
        sides: &[Option<Channel>],
        params: &CriterionParams,
        optimal: bool,
    ) -> ChannelAssignment {
        let mut state = State::new(self);
        for (v, side) in sides.iter().enumerate() {
            state.assign(v, side.unwrap_or(Channel::A));
        }
        let p = state.payloads();
        ChannelAssignment {
            channel_of: self
                .ecus
                .iter()
                .copied()
                .zip(state.side.iter().map(|s| s.unwrap_or(Channel::A)))
                .collect(),
            payload_a: p.a,
            payload_b: p.b,
            payload_gw: p.gw,
            criterion: criterion_value(p, params),
            optimal,
        }
    }
}

/// Incrementally maintained (partial) assignment.
///
/// An edge counts toward a channel as soon as one of its assigned free
/// endpoints lies there, so a complete assignment yields exactly the
/// criterion payloads and a partial one yields a partial criterion.
#[derive(Clone, Debug)]
pub(crate) struct State<'p> {
    problem: &'p Problem,
    pub side: Vec<Option<Channel>>,
    count: Vec<[u32; 2]>,
    pa: u64,
    pb: u64,
    pg: u64,
    /// Weight of edges with no assigned endpoint yet.
    untouched: u64,
}

#[derive(Clone, Copy, Default)]
struct Delta {
    a: i64,
    b: i64,
    g: i64,
    u: i64,
}

impl Delta {
    fn edge(weight: u64, old: [u32; 2], new: [u32; 2]) -> Delta {
        let w = weight as i64;
        let flags = |c: [u32; 2]| {
            let (a, b) = (c[0] > 0, c[1] > 0);
            (a as i64, b as i64, (a && b) as i64, (!a && !b) as i64)
        };
        let (a0, b0, g0, u0) = flags(old);
        let (a1, b1, g1, u1) = flags(new);
        Delta {
            a: w * (a1 - a0),
            b: w * (b1 - b0),
            g: w * (g1 - g0),
            u: w * (u1 - u0),
        }
    }

    fn add(&mut self, o: Delta) {
        self.a += o.a;
        self.b += o.b;
        self.g += o.g;
        self.u += o.u;
    }
}

fn shift(x: u64, d: i64) -> u64 {
    (x as i64 + d) as u64
}

impl<'p> State<'p> {
    pub fn new(problem: &'p Problem) -> Self {
        Self {
            problem,
            side: alloc::vec![None; problem.len()],
            count: alloc::vec![[0, 0]; problem.edges.len()],
            pa: 0,
            pb: 0,
            pg: 0,
            untouched: problem.edges.iter().map(|e| e.weight).sum(),
        }
    }

    pub fn payloads(&self) -> Payloads {
        Payloads {
            a: self.pa + self.problem.ft_weight,
            b: self.pb + self.problem.ft_weight,
            gw: self.pg,
        }
    }

    pub fn untouched_weight(&self) -> u64 {
        self.untouched
    }

    fn apply(&mut self, d: Delta) {
        self.pa = shift(self.pa, d.a);
        self.pb = shift(self.pb, d.b);
        self.pg = shift(self.pg, d.g);
        self.untouched = shift(self.untouched, d.u);
    }

    fn with_delta(&self, d: Delta) -> Payloads {
        Payloads {
            a: shift(self.pa, d.a) + self.problem.ft_weight,
            b: shift(self.pb, d.b) + self.problem.ft_weight,
            gw: shift(self.pg, d.g),
        }
    }

    /// Change of the edge sums when `v` leaves `from` (if any) and joins `to` (if any).
    fn move_delta(&self, v: usize, from: Option<Channel>, to: Option<Channel>) -> Delta {
        let mut d = Delta::default();
        for &e in &self.problem.incident[v] {
            let old = self.count[e];
            let mut new = old;
            if let Some(c) = from {
                new[c.index()] -= 1;
            }
            if let Some(c) = to {
                new[c.index()] += 1;
            }
            d.add(Delta::edge(self.problem.edges[e].weight, old, new));
        }
        d
    }

    fn commit_move(&mut self, v: usize, from: Option<Channel>, to: Option<Channel>) {
        let d = self.move_delta(v, from, to);
        for &e in &self.problem.incident[v] {
            if let Some(c) = from {
                self.count[e][c.index()] -= 1;
            }
            if let Some(c) = to {
                self.count[e][c.index()] += 1;
            }
        }
        self.apply(d);
        self.side[v] = to;
    }

    pub fn assign(&mut self, v: usize, ch: Channel) {
        let from = self.side[v];
        self.commit_move(v, from, Some(ch));
    }

    pub fn unassign(&mut self, v: usize) {
        let from = self.side[v];
        self.commit_move(v, from, None);
    }

    pub fn flip(&mut self, v: usize) {
        let from = self.side[v].expect("flip of an unassigned ECU");
        self.commit_move(v, Some(from), Some(from.other()));
    }

    pub fn payloads_after_assign(&self, v: usize, ch: Channel) -> Payloads {
        self.with_delta(self.move_delta(v, self.side[v], Some(ch)))
    }

    pub fn payloads_after_flip(&self, v: usize) -> Payloads {
        let from = self.side[v].expect("flip of an unassigned ECU");
        self.payloads_after_assign(v, from.other())
    }

    /// Payloads after exchanging the channels of `v` and `w` (which must differ).
    pub fn payloads_after_swap(&mut self, v: usize, w: usize) -> Payloads {
        self.flip(v);
        let p = self.payloads_after_flip(w);
        self.flip(v);
        p
    }
}

#[cfg(test)]
pub(crate) mod testkit {
    //! Exhaustive enumeration, written independently of `State`.

    use super::*;

    pub fn brute_payloads(hg: &Hypergraph, on_a: &dyn Fn(EcuId) -> bool) -> Payloads {
        let mut p = Payloads {
            a: hg.ft_weight_bytes,
            b: hg.ft_weight_bytes,
            gw: 0,
        };
        for e in &hg.edges {
            if e.free_endpoints.is_empty() {
                continue;
            }
            let any_a = e.free_endpoints.iter().any(|v| on_a(*v));
            let any_b = e.free_endpoints.iter().any(|v| !on_a(*v));
            if !any_b {
                p.a += e.weight_bytes;
            } else if !any_a {
                p.b += e.weight_bytes;
            } else {
                p.a += e.weight_bytes;
                p.b += e.weight_bytes;
                p.gw += e.weight_bytes;
            }
        }
        p
    }

    pub fn brute_value(p: Payloads, params: &CriterionParams) -> f64 {
        let a = params.beta * p.a as f64;
        let b = p.b as f64;
        (if a > b { a } else { b }) + params.alpha * p.gw as f64
    }

    /// Minimum over all `2^n` assignments and the mask (bit i set = `free_ecus[i]` on A).
    pub fn brute_minimum(hg: &Hypergraph, params: &CriterionParams) -> (f64, u64) {
        let n = hg.free_ecus.len();
        assert!(n <= 20);
        let mut best = (f64::INFINITY, 0);
        for mask in 0u64..(1 << n) {
            let on_a = |e: EcuId| {
                let i = hg.free_ecus.iter().position(|x| *x == e).unwrap();
                mask >> i & 1 == 1
            };
            let v = brute_value(brute_payloads(hg, &on_a), params);
            if v < best.0 {
                best = (v, mask);
            }
        }
        best
    }

    pub fn map_from_mask(hg: &Hypergraph, mask: u64) -> BTreeMap<EcuId, Channel> {
        hg.free_ecus
            .iter()
            .enumerate()
            .map(|(i, e)| (*e, if mask >> i & 1 == 1 { Channel::A } else { Channel::B }))
            .collect()
    }
}
