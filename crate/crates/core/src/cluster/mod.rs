//! Graph states, measurement rewrite rules and one-way computation under loss.

mod graph;
mod oneway;
mod pattern;

pub use graph::{
    graph_cluster_state, graph_xx_contract, graph_z_remove, xx_contract_byproduct, z_remove_byproduct, Graph,
};
pub use oneway::{
    loss_tolerant_rotation, noisy_phi5, oneway_pattern, phi5, phi5_from_cluster, phi5_graph, rotation_target, LossCase,
};
pub use pattern::{
    enumerate_pattern, indirect_z, run_pattern, Feedforward, IndirectZ, MeasurementPattern, OneWayResult, Step,
};
