//! Cell-centered Lagrangian finite volume solver for the GPR model of
//! continuum mechanics on moving triangular meshes.
//!
//! The scheme evolves specific volume, velocity, entropy, distortion and
//! thermal impulse per cell, with single-valued node velocities moving the mesh.
//! Total energy is not evolved; it is conserved by construction through the
//! nodal compatibility correction.

pub mod cases;
pub mod error;
pub mod exec;
pub mod mesh;
pub mod nodal;
pub mod numerics;
pub mod ops;
pub mod scheme;
pub mod thermo;
pub mod timeloop;

pub use error::{HtcError, Result};
pub use exec::Exec;
