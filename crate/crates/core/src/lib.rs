//! Simulation of quantum mechanics under two measurement postulates: the
//! usual projective collapse, and passive measurements that return
//! Born-distributed outcomes while leaving the state untouched.

pub mod composite;
pub mod error;
pub mod hilbert;
pub mod measurement;
pub mod protocols;
pub mod harness;
pub mod tomography;

pub use error::{Error, Result};
