//! Holed trapezohedra, signed enclosed volumes, framing groups and
//! SL(2, C) lifting obstructions in the upper half-space model.

pub mod acceptance;
pub mod error;
pub mod framing;
pub mod gluing;
pub mod holonomy;
pub mod hypgeo;
pub mod linalg;
pub mod mesh;
pub mod polyhedron;
pub mod quadrature;
pub mod volume;

pub use error::{Error, Result};
