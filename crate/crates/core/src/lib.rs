//! Exact simulation of qubit-pair coherence-preserving encodings.
//!
//! Pairs each data qubit with an ancilla that couples to the same bath modes,
//! drives away the free qubit Hamiltonian, and encodes logical states into
//! the common zero-eigenspace of the pair noise operators. Everything is
//! dense, finite-dimensional, and evolved exactly by diagonalization.

pub mod circuit;
pub mod config;
pub mod dfs;
pub mod evolve;
pub mod experiment;
pub mod gates;
pub mod model;
pub mod qops;
pub mod runner;
pub mod tolerances;

pub use qops::{CMatrix, CVector, NoiseVector};
