//! Nonlinear domain decomposition (L-scheme) solver for multi-model
//! two-phase flow in porous media with full/reduced model coupling.

pub mod constitutive;
pub mod fem;
pub mod geometry;
pub mod ldd;
pub mod linalg;
pub mod verify;
