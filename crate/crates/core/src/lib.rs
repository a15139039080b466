//! Simulation and numerics for the vacant set of simple random walk on the
//! discrete torus `(Z/NZ)^d`.

pub mod coupling_lab;
pub mod error;
pub mod experiments;
pub mod lattice;
pub mod potential_theory;
pub mod rng;
pub mod stats;
pub mod vacancy_analysis;
pub mod walk_engine;

pub use error::{Error, Result};
