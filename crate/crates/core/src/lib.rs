//! Counting periodic orbits of planar rational recurrences.
//!
//! Two independent routes are provided. The [`cohomology`] module predicts
//! the number of period-`n` points from the action of the map on the
//! cohomology of a (possibly blown-up) projective plane, and the [`solver`]
//! module finds those points numerically by eliminating the fixed-point
//! system of the composed map. [`families`] registers the concrete
//! recurrences, and [`proj_map`] holds the projective-plane machinery
//! (composition, degree growth, indeterminacy, critical curves).

pub mod cohomology;
pub mod error;
pub mod families;
pub mod poly;
pub mod proj_map;
pub mod report;
pub mod solver;

#[cfg(feature = "cli")]
pub mod cli;

pub use error::{Error, Result};
