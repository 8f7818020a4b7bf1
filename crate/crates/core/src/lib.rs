//! Scheduling of FlexRay static segments over two independent channels
//! joined by a gateway.
//!
//! The pipeline aggregates signals into a [`hypergraph`], assigns one-port
//! ECUs to channels ([`assignment`]), packs signals into slot/cycle/offset
//! positions on both channels ([`scheduler`]) and iterates the two steps in
//! [`driver`]. [`validator`] checks schedules independently of the packer
//! and [`generator`] synthesises benchmark instances.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod assignment;
pub mod driver;
pub mod generator;
pub mod hypergraph;
pub mod model;
pub mod scheduler;
pub mod validator;

pub use assignment::{Channel, ChannelAssignment, CriterionParams};
pub use hypergraph::{build_hypergraph, Hyperedge, Hypergraph};
pub use model::{Ecu, EcuClass, EcuId, Instance, ModelError, NetworkConfig, Signal};
