//! Iteration of holomorphic self-maps of the unit disk: Denjoy–Wolff
//! classification, hyperbolic step, grand orbits and Blaschke
//! eigenfunctions of composition operators, Abel functions, and
//! Nevanlinna counting.

pub mod abel;
pub mod cli;
pub mod counting;
pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod geometry;
pub mod orbits;
pub mod poly;
pub mod presets;
pub mod selfmap;
pub mod suite;

pub use error::{Error, Result};
pub use geometry::{DiskPoint, Horodisk};
pub use selfmap::{
    compose, CompositeMap, DiskMap, FiniteBlaschkeProduct, HalfPlaneAffine, HalfPlaneAutomorphism,
    WeightedPoint,
};
