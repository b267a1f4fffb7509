//! Compile integer-coefficient QUBO cost functions into Rydberg-atom graphs
//! and check the encoding.
//!
//! The pipeline has three layers:
//!
//! * [`qubo`] holds the cost function and a brute-force oracle.
//! * [`compile`] builds an [`AtomGraph`](graph::AtomGraph) out of four gadget
//!   types (data copies, offsets, even wires, odd wires) and decodes atom
//!   configurations back to variable assignments.
//! * [`solver`], [`geometry`] and [`sim`] check the result three ways: exact
//!   maximum-independent-set enumeration, unit-disk validation of atom
//!   coordinates, and state-vector simulation of the driven Rydberg
//!   Hamiltonian under an adiabatic pulse schedule.
//!
//! ```
//! use rydberg_qubo::{compile, qubo::QuboInstance, solver};
//!
//! // f = -2 x1 + x2 + x1 x2
//! let q = QuboInstance::new(2, [(0, -2), (1, 1)], [((0, 1), 1)]).unwrap();
//! let graph = compile::compile(&q, &compile::WireLengthPolicy::default()).unwrap();
//! assert_eq!(graph.num_atoms(), 7);
//! let report = solver::certify_equivalence(&q, &graph, &solver::SearchLimits::default()).unwrap();
//! assert!(report.pass);
//! ```

pub mod builtin;
pub mod compile;
pub mod geometry;
pub mod graph;
pub mod qubo;
pub mod sim;
pub mod solver;

pub use graph::{AtomGraph, AtomId, AtomRole};
pub use qubo::{Assignment, QuboInstance};
