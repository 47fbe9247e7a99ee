//! Entanglement criteria for measurement-based quantum computation resources.
//!
//! The crate is organised bottom-up:
//!
//! - [`gf2`]: packed binary matrices and GF(2) rank (the engine behind cut-rank).
//! - [`graphstate`]: graphs, the 24-element local Clifford group, graph states with a
//!   Clifford byproduct frame, and the Pauli-measurement rewrite rules.
//! - [`statevec`]: a dense pure-state simulator used as ground truth for every
//!   graph-level claim.
//! - [`widths`]: subcubic trees, entanglement width, Schmidt-rank width, cut-rank and
//!   rank-width.
//! - [`monotones`]: geometric measure, Schmidt-measure bounds and Bell-pair
//!   localization on graph states.
//! - [`lattices`]: lattice generators, the hexagonal → triangular → Kagome → square
//!   conversion chain and the adaptive measurement-pattern executor.
//! - [`encoded`]: logical encodings, coarse-grained measures and logical measurements.

pub mod encoded;
pub mod error;
pub mod gf2;
pub mod graphstate;
pub mod lattices;
pub mod monotones;
pub mod statevec;
pub mod widths;

pub use error::{Error, Result};
pub use gf2::{rank_gf2, BitMatrix};
pub use graphstate::{Clifford, Graph, GraphState, Pauli};
pub use statevec::{Bipartition, PureState};

/// Default ceiling on dense state-vector size.
pub const DEFAULT_STATEVEC_LIMIT: usize = 22;
