//! Circuits as descriptions of truth tables.
//!
//! A truth table on `n` inputs is a string of `2^n` bits; a circuit over the
//! `{AND, OR, NOT}` basis is a compressed description of one. This crate
//! provides both directions of that correspondence and the tooling built on
//! top of it:
//!
//! * [`table`] / [`circuit`] - the data model: tables, gates, evaluation,
//!   validation, text formats, DOT export.
//! * [`codec`] - bit-exact circuit serialization with a closed-form length,
//!   plus compression-ratio and entropy-audit arithmetic.
//! * [`synth`] - table-to-circuit synthesis: the canonical one-detector-per-row
//!   lookup circuit and the shared-equality-bank block expansion.
//! * [`mcsp`] - minimum-circuit-size machinery: verification, exact
//!   minimization by a frontier sweep over table space, and a CNF encoding of
//!   "some circuit of fewer than `s` gates computes `T`" for SAT solvers.
//! * [`sat`] - a small CDCL solver and DIMACS plumbing.
//! * [`census`] - exhaustive small-arity experiments: per-function minimal
//!   sizes, compressor tables, and structure metrics.

pub mod census;
pub mod circuit;
pub mod codec;
pub mod mcsp;
pub mod sat;
pub mod synth;
pub mod table;

mod util;

pub use circuit::{BasisSpec, Circuit, CircuitBuilder, CircuitError, Gate, GateOp, Violation, Wire};
pub use table::{TableError, TruthTable};
