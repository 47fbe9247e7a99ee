//! Entanglement monotones evaluated on states and graph states.
//!
//! - [`geometric_measure`]: `-log2` of the best product-state overlap.
//! - [`schmidt_measure_bounds`]: interval for `log2` of the minimal number of product
//!   terms.
//! - [`bell_localization_pattern`] and [`n_le`]: deterministic Bell-pair extraction on
//!   graph states by Pauli measurements.

mod bell;
mod geometric;
mod schmidt;

pub use bell::{
    bell_localization_pattern, n_le, run_on_graph, run_on_statevector, verify_bell_pattern,
    BellPattern, BellVerification, NleReport, PauliStep,
};
pub use geometric::{
    geometric_measure, w_state_geometric_measure, GeometricOptions, GeometricReport,
};
pub use schmidt::{max_bipartite_rank, schmidt_measure_bounds, SchmidtBounds, SchmidtOptions};
