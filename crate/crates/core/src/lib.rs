//! Simulation of traceroute-like exploration on synthetic networks.

pub mod centrality;
pub mod error;
pub mod experiments;
pub mod explorer;
pub mod generators;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod paths;
pub mod report;
pub mod seed;
pub mod theory;

pub use error::{Error, Result};
pub use graph::Graph;
