//! Abelian sandpile relaxation on dilated lattice polygons, and the tropical
//! geometry needed to read off the scaling limits of the deviation locus and
//! the toppling function.

pub mod analysis;
pub mod config;
pub mod grid_io;
pub mod lattice;
pub mod rational;
pub mod render;
pub mod sandpile;
pub mod tropical;

pub use lattice::{LatticePoint, LatticePolygon, PerturbationConfig, PlanePoint, ScaledDomain};
pub use rational::Rational;
pub use sandpile::{Odometer, RelaxationResult, SandState};
