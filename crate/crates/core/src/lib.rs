//! Greedy gradient-free adaptive variational eigensolvers on a dense
//! state-vector simulator.
//!
//! Layers, bottom up: [`pauli`] (symbolic Pauli algebra), [`simulator`]
//! (state vectors and ansätze), [`hamiltonian`] and [`pools`] (problem
//! inputs), [`landscape`] (analytic one- and two-angle landscapes),
//! [`measurement`] (exact and shot-sampled estimation) and [`drivers`]
//! (the adaptive loops).

pub mod drivers;
pub mod error;
pub mod hamiltonian;
pub mod landscape;
pub mod measurement;
pub mod pauli;
pub mod pools;
pub mod simulator;

pub use error::{Error, Result};
