//! Entanglement of bipartite quantum channels under PPT operations.
//!
//! Choi-matrix carriers for channels, superchannels and combs, the PPT
//! predicates that act on them, a dense conic solver and the semidefinite
//! programs built on top of it (negativity, max-logarithmic negativity,
//! conversion distance, the monotone family, exact cost, witnesses).

pub mod cli;
pub mod measures;
pub mod quantum;
pub mod solver;
pub mod tensor;
pub mod witness_scenarios;

pub use tensor::{CMatrix, DimSpec, LabeledMatrix, C64};
