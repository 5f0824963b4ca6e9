//! Commutative triplet structures over finite groups: build the hypergraph
//! and its derived graphs, verify the structural conditions and lemmas
//! exactly, and certify the spectral convergence bounds numerically.

pub mod constructions;
pub mod error;
pub mod graph;
pub mod group;
pub mod products;
pub mod report;
pub mod spectra;
pub mod triplet;
pub mod walk;

pub use error::{Error, Result};
