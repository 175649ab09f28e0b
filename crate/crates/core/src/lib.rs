//! Piecewise-affine torus maps built from triangle-wave shears.
//!
//! The crate constructs lifts of torus homeomorphisms whose iterates spread
//! the unit square onto prescribed zonogons, checks those constructions
//! stage by stage against their target polygons, and estimates rotation sets
//! and related finite-time diagnostics.

pub mod dynamics;
pub mod error;
pub mod geom;
pub mod homothety;
pub mod rotation;
pub mod spreader;

pub use error::{Error, Result};
