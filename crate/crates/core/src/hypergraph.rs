//! Aggregation of non-fault-tolerant signals into hyperedges keyed by their
//! endpoint set.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::model::{EcuClass, EcuId, Instance};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperedge {
    /// Transmitter and receivers, gateway excluded, ascending.
    pub endpoints: Vec<EcuId>,
    /// The one-port subset of `endpoints`.
    pub free_endpoints: Vec<EcuId>,
    pub weight_bytes: u64,
    /// Signal ids, ascending.
    pub member_signals: Vec<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Hypergraph {
    pub edges: Vec<Hyperedge>,
    /// All one-port ECUs of the instance, ascending.
    pub free_ecus: Vec<EcuId>,
    /// Payload of fault-tolerant signals; carried on both channels regardless
    /// of the assignment.
    pub ft_weight_bytes: u64,
}

impl Hypergraph {
    pub fn total_edge_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight_bytes).sum()
    }
}

pub fn build_hypergraph(inst: &Instance) -> Hypergraph {
    let net = inst.network();
    let mut groups: BTreeMap<Vec<EcuId>, (u64, Vec<u32>)> = BTreeMap::new();
    let mut ft_weight_bytes = 0;

    for s in &inst.signals {
        if s.fault_tolerant {
            ft_weight_bytes += u64::from(s.payload_bytes);
            continue;
        }
        let mut endpoints: Vec<EcuId> = core::iter::once(s.transmitter)
            .chain(s.receivers.iter().copied())
            .filter(|e| net.class_of(*e) != Some(EcuClass::Gateway))
            .collect();
        endpoints.sort_unstable();
        endpoints.dedup();
        let entry = groups.entry(endpoints).or_default();
        entry.0 += u64::from(s.payload_bytes);
        entry.1.push(s.id);
    }

    let edges = groups
        .into_iter()
        .map(|(endpoints, (weight_bytes, mut member_signals))| {
            member_signals.sort_unstable();
            let free_endpoints = endpoints
                .iter()
                .copied()
                .filter(|e| net.is_one_port(*e))
                .collect();
            Hyperedge {
                endpoints,
                free_endpoints,
                weight_bytes,
                member_signals,
            }
        })
        .collect();

    Hypergraph {
        edges,
        free_ecus: net.one_port_ecus().collect(),
        ft_weight_bytes,
    }
}
