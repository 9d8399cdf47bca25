//! Cone metric spaces, the T-contraction classes, monitored Picard iteration
//! and an exact brute-force checker for finite instances.

pub mod cli;
pub mod cone_space;
pub mod contractions;
pub mod error;
pub mod instances;
pub mod oracle;
pub mod sampling;
pub mod solver;

pub use error::{Error, Result};
