//! Text formats: edge lists, generator spec strings and experiment
//! configuration files.

mod config;
mod edgelist;
mod graph_spec;

pub use config::{ExperimentConfig, ExperimentMode, RawConfig, RhoGrid};
pub use edgelist::{
    parse_edge_list, parse_edge_list_with_limit, read_edge_list, read_edge_list_file, write_edge_list,
    write_edge_list_file, MAX_VERTICES,
};
pub use graph_spec::GraphSpec;
