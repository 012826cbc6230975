//! Basis-independent ("absolute") Wigner negativity of sets of qubit states
//! and measurements.

pub mod annealing;
pub mod cli;
pub mod error;
pub mod estimation;
pub mod free_geometry;
pub mod hierarchy;
pub mod quantifiers;
pub mod quantum_core;
pub mod random;
pub mod wigner_frames;

pub use error::{Error, Result};
