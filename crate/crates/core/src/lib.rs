//! Nodal/domain averages of kinetic and potential energy for few-electron
//! states.
//!
//! The crate is `no_std` with `alloc`. IO, threading and the command line
//! live in the `nda` crate.

#![no_std]

extern crate alloc;

pub mod catalog;
pub mod config;
pub mod error;
pub mod estimators;
pub mod exec;
pub mod hamiltonian;
pub mod orbital;
pub mod quadrature;
pub mod reference;
pub mod sampling;
pub mod stats;
pub mod surface;
pub mod topology;
pub mod wavefunction;

pub use catalog::{lookup, StateParams, StateSpec};
pub use config::Configuration;
pub use error::{NdaError, Result};
pub use hamiltonian::HamiltonianSpec;
pub use wavefunction::WaveFunctionModel;
