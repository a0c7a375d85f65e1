//! Circulations of directed hypergraphs and the truncated products over
//! them. Arity 2 covers closed walks of digraphs, arity 4 the hypergraph
//! case; most of the machinery is written for any arity.
//!
//! Instance `(head, tail)` encodes the arc `tail -> head` at arity 2. At
//! arity 4 positions 0, 1, 2 carry the white, red and green arcs and
//! position 3 the blue one.

pub mod circuits;
pub mod coin;
pub mod enumerate;
pub mod feasibility;
pub mod stones;
pub mod structure;
pub mod walks;

pub use circuits::{circuit_cover_expansion, circuit_det_expansion, enumerate_circuits, Circuit, CircuitError};
pub use coin::coin_lemma_check;
pub use enumerate::{enumerate_circulations, is4_truncated, EnumerationError, EnumerationLimits};
pub use feasibility::{check_feasibility, feasibility_closure, Closure};
pub use stones::{recompose, stones_decompose, Stone, StoneError};
pub use structure::{check_structure, Circulation, Connector, ConnectorCycle, Instance};
pub use walks::{enumerate_aperiodic_walks, is2_truncated, ClosedWalk, Digraph, DigraphError};
