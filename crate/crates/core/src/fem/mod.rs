//! P1 finite elements on subdomain meshes, system assembly, interface flux
//! reconstruction and trace projection.

mod assembly;
mod field;
mod interface;
mod quadrature;
mod space;

pub use assembly::{
    assemble_subdomain_system, assemble_unconstrained, cell_mobility, AssembledSystem,
    InterfaceTerm, SystemInputs,
};
pub use field::{P1Field, TraceFieldDG1};
pub use interface::{project_trace, reconstruct_interface_flux, Pressures};
pub use quadrature::QuadratureRule;
pub use space::{InterfaceTrace, SubdomainSpace};

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::linalg::LinalgError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FemError {
    #[error("expected {expected} values, found {found}")]
    DofMismatch { expected: usize, found: usize },
    #[error("no g-term supplied for neighbour {} of subdomain {}", neighbor + 1, subdomain + 1)]
    MissingGTerm { subdomain: usize, neighbor: usize },
    #[error("subdomain {} has no nonwetting equation", subdomain + 1)]
    PhaseModelMismatch { subdomain: usize },
    #[error("subdomain {} is not a neighbour of subdomain {}", neighbor + 1, subdomain + 1)]
    NotNeighbor { subdomain: usize, neighbor: usize },
    #[error("interface between subdomains {} and {} has a facet without an adjacent cell", subdomain + 1, neighbor + 1)]
    MalformedTrace { subdomain: usize, neighbor: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
