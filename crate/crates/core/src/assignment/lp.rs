//! Export of the assignment model in CPLEX LP text format, so that any MILP
//! solver can cross-check the branch-and-bound result.
//!
//! Fault-tolerant payload enters as a constant on both channels and edges
//! without one-port endpoints are left out, which keeps the model's optimum
//! identical to [`super::evaluate_criterion`].

use alloc::string::String;
use core::fmt::Write;

use super::{CriterionParams, Problem};
use crate::hypergraph::Hypergraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LpStats {
    pub binaries: usize,
    pub constraints: usize,
}

pub fn to_lp_string(hg: &Hypergraph, params: &CriterionParams) -> (String, LpStats) {
    let problem = Problem::new(hg);
    let ft = problem.ft_weight;
    let total: u64 = problem.edges.iter().map(|e| e.weight).sum();
    let x = |v: usize| alloc::format!("x_{}", problem.ecus[v].0);
    let mut out = String::new();
    let mut constraints = 0;

    // writing into a String cannot fail
    let _ = writeln!(out, "\\ ECU-to-channel assignment: {} free ECUs, {} edges", problem.len(), problem.edges.len());
    let _ = writeln!(out, "Minimize");
    let _ = writeln!(out, " obj: z + {} PG", params.alpha);
    let _ = writeln!(out, "Subject To");

    let _ = writeln!(out, " balance_a: {} PA - z <= 0", params.beta);
    let _ = writeln!(out, " balance_b: PB - z <= 0");
    let _ = writeln!(out, " gateway: PA + PB - PG = {}", total + 2 * ft);
    constraints += 3;

    let mut load = |name: &str, var: &str, side: &str| {
        let _ = write!(out, " {name}:");
        for (e, edge) in problem.edges.iter().enumerate() {
            let _ = write!(out, " + {} u{side}_{e}", edge.weight);
        }
        let _ = writeln!(out, " - {var} = {}", -(ft as i64));
    };
    load("load_a", "PA", "A");
    load("load_b", "PB", "B");
    constraints += 2;

    for (e, edge) in problem.edges.iter().enumerate() {
        for &v in &edge.ends {
            let _ = writeln!(out, " link_a_{e}_{}: {} - uA_{e} <= 0", problem.ecus[v].0, x(v));
            let _ = writeln!(out, " link_b_{e}_{}: {} + uB_{e} >= 1", problem.ecus[v].0, x(v));
            constraints += 2;
        }
    }

    let order = problem.branching_order();
    if params.is_symmetric() && !order.is_empty() {
        let _ = writeln!(out, " pin: {} = 1", x(order[0]));
        constraints += 1;
    }

    let _ = writeln!(out, "Bounds");
    for e in 0..problem.edges.len() {
        let _ = writeln!(out, " 0 <= uA_{e} <= 1");
        let _ = writeln!(out, " 0 <= uB_{e} <= 1");
    }
    let _ = writeln!(out, " PA >= 0");
    let _ = writeln!(out, " PB >= 0");
    let _ = writeln!(out, " PG >= 0");
    let _ = writeln!(out, " z >= 0");

    if problem.len() > 0 {
        let _ = writeln!(out, "Binary");
        for v in 0..problem.len() {
            let _ = writeln!(out, " {}", x(v));
        }
    }
    let _ = writeln!(out, "End");

    (
        out,
        LpStats {
            binaries: problem.len(),
            constraints,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::build_hypergraph;
    use crate::model::fixtures::example_one;

    #[test]
    fn example_one_model_size() {
        let hg = build_hypergraph(&example_one());
        let params = CriterionParams::new(1.0 / 52.0, 1.0).unwrap();
        let (text, stats) = to_lp_string(&hg, &params);
        assert_eq!(stats.binaries, 3);
        let incidences: usize = hg.edges.iter().map(|e| e.free_endpoints.len()).sum();
        assert!(stats.constraints <= 6 + 2 * incidences);
        assert_eq!(stats.constraints, 6 + 2 * incidences);
        assert!(text.contains(" pin: x_4 = 1"));
        assert!(text.contains("gateway: PA + PB - PG = 60"));
        assert!(text.contains("Binary\n x_3\n x_4\n x_5\n"));
        assert!(text.ends_with("End\n"));
    }

    #[test]
    fn empty_edge_set() {
        let params = CriterionParams::new(0.0, 1.0).unwrap();
        let (text, stats) = to_lp_string(&Hypergraph::default(), &params);
        assert_eq!(stats, LpStats { binaries: 0, constraints: 5 });
        assert!(text.contains("obj: z + 0 PG"));
        assert!(!text.contains("Binary"));
    }

    #[test]
    fn asymmetric_weights_drop_the_pin() {
        let hg = build_hypergraph(&example_one());
        let (text, _) = to_lp_string(&hg, &CriterionParams::new(0.0, 1.5).unwrap());
        assert!(!text.contains("pin:"));
        assert!(text.contains("balance_a: 1.5 PA - z <= 0"));
    }
}
