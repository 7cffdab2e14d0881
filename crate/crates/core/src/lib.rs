//! Exact certification of strong Zariski density for the SL(4) holonomy
//! family `ρ_v` of the Vol3 orbifold group.

pub mod bridge;
pub mod certifier;
pub mod charpoly;
pub mod config;
pub mod error;
pub mod forms;
pub mod linalg;
pub mod matrix;
pub mod rep;
pub mod scalars;

pub use error::{Error, Result};
