//! File formats, exporters and batch runners around [`fxsched_core`].

pub mod bench;
pub mod fibex;
pub mod io;
pub mod solver;
pub mod sweep;

pub use fxsched_core as core;
