//! Discrete Ricci flow on axisymmetric piecewise-linear 3-geometries.
//!
//! The geometry is a stack of icosahedral cross-sections joined by
//! triangle-based frustum blocks ([`lattice`]). Each edge length evolves by
//! `dℓ/dt = −ℓ Rc` with an edge-local Ricci value built from Regge deficits
//! and dual cell measures ([`curvature`]). A neckpinch is integrated through
//! by surgery ([`surgery`]), after which each lobe flows towards a round
//! collapse ([`flow`]). The [`forman`] module computes Forman–Ricci curvature
//! on weighted graphs and exports the corresponding lattice weights.

pub mod curvature;
pub mod embed;
pub mod error;
pub mod flow;
pub mod forman;
pub mod geometry;
pub mod io;
pub mod lattice;
pub mod profiles;
pub mod remesh;
pub mod surgery;

pub use error::{Error, Result};
pub use lattice::{EndTreatment, NeckpinchLattice};
