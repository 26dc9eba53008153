//! Numerical laboratory for Chern–Ricci flat balanced metrics glued onto small
//! resolutions of nodal Calabi–Yau threefolds.
//!
//! The crate evaluates the model metrics on the resolved conifold, assembles
//! the cut-off balanced metric through Michelsohn square roots, measures decay
//! rates of the resulting Chern–Ricci potential, and runs a radial desk-scale
//! version of the fixed-point deformation.

pub mod analysis;
pub mod cdlo;
pub mod cli;
pub mod conifold;
pub mod config;
pub mod error;
pub mod field;
pub mod forms;
pub mod gluing;
pub mod solver;

#[cfg(test)]
pub(crate) mod testing;

pub use error::{Error, Result};
