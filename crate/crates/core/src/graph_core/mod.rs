//! Instance model, verification predicates and exact desk-scale oracles.

pub mod exact;
pub mod flow;
pub mod graph;
pub mod instance;
pub mod verify;

pub use exact::{
    brute_force_disjoint, exact_max_disjoint, exact_max_disjoint_with, max_disjoint_value,
    solve_disjoint_pairs, DEFAULT_BUDGET,
};
pub use flow::{max_flow_biclique, vertex_flow, VertexFlow};
pub use graph::{mask_of, members, Graph};
pub use instance::{
    attach_degree_one_terminals, AttachedInstance, Instance, PathSet, PatternWitness, Separation,
    WitnessKind,
};
pub use verify::{is_valid_path, verify_hitting_set, verify_solution};
