//! Exact simulation of multi-photon linear-optical circuits over polarization,
//! orbital angular momentum and path modes, built around spin-orbit
//! teleportation: hyper-entangled sources, the cascaded hyper-entangled Bell
//! measurement with teleportation-based QND, Pauli corrections, noise models
//! and the N-DoF Bell-measurement cascade.

pub mod cascade;
pub mod conformance;
pub mod elements;
pub mod error;
pub mod exec;
pub mod measurement;
pub mod optical;
pub mod protocol;
pub mod sources;

pub use error::{Error, Result};
pub use exec::Exec;
