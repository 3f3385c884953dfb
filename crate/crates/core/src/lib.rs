//! Design and characterization of electrostatic guides ("quantum wires") and
//! traps ("quantum dots") for neutral atoms held above an atom mirror.
//!
//! A charged wire or point on the mirror surface attracts the atom through
//! its induced dipole; the mirror's exponential repulsion keeps it off the
//! surface. The crate evaluates these potentials, finds and characterizes
//! the resulting minima, and computes bound states on finite-difference grids.

pub mod app;
pub mod config;
pub mod eigen;
pub mod error;
pub mod field;
pub mod geometry;
pub mod optimize;
pub mod potential;
pub mod quad;
pub mod species;
pub mod tables;
pub mod trap;
pub mod units;

/// Position or field vector in the surface frame `[n, t, a]`.
pub type Vec3 = nalgebra::Vector3<f64>;

pub use error::{Error, Result};
pub use field::{electric_field, ChargeElement};
pub use potential::{
    dot_potential_closed_form, mirror_potential, polarization_energy, total_potential, vdw_potential,
    wire_potential_closed_form, MirrorKind, MirrorSpec, PotentialStack,
};
pub use species::{AtomSpecies, ConstantsRegistry};
