//! Polluted bootstrap percolation on the cubic lattice.

pub mod compare;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod lattice;
pub mod rng;
pub mod sampler;
pub mod shell;
pub mod snapshot;
pub mod stego;

pub use dynamics::{evolve, Configuration, Region, Rule, SiteState, Variant};
pub use error::{Error, Result};
pub use lattice::{Cuboid, Vertex};
