//! Partitioned domains, conforming meshes and interface structures.

mod mesh;
mod partition;
pub mod polygon;

pub use mesh::{triangulate, Facet, Interface, MultiDomainMesh, Submesh, TraceRecord};
pub use partition::{build_partition, Model, Partition, PartitionSpec, SubdomainSpec};

use thiserror::Error;

pub type Point = [f64; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("partition has no subdomains")]
    NoSubdomains,
    #[error("invalid global polygon: {0}")]
    InvalidGlobalPolygon(String),
    #[error("subdomain {}: {reason}", subdomain + 1)]
    InvalidSubdomain { subdomain: usize, reason: String },
    #[error("subdomain {} has empty interior", subdomain + 1)]
    EmptyInterior { subdomain: usize },
    #[error("subdomain {} extends outside the global polygon", subdomain + 1)]
    OutsideDomain { subdomain: usize },
    #[error("subdomains {} and {} overlap", first + 1, second + 1)]
    Overlap { first: usize, second: usize },
    #[error("subdomains leave an uncovered area of {uncovered}")]
    Gap { uncovered: f64 },
    #[error("subdomain areas exceed the global area by {excess}")]
    AreaExcess { excess: f64 },
    #[error("resolution must be at least 1")]
    InvalidResolution,
    #[error("polygon edge of length {edge_length} is shorter than the target edge length {target}; refine")]
    RefinementRequired { edge_length: f64, target: f64 },
    #[error("polygon vertex {point:?} is not resolved by the grid at resolution {resolution}")]
    NotGridAligned { point: Point, resolution: usize },
    #[error("cell with centroid {centroid:?} lies in no subdomain")]
    UncoveredCell { centroid: Point },
    #[error("edge {vertices:?} has more than two adjacent cells")]
    NonManifoldEdge { vertices: [usize; 2] },
    #[error("mesh neighbours of subdomain {} disagree with the partition", subdomain + 1)]
    NeighborMismatch { subdomain: usize },
    #[error("subdomain {} is not a neighbour of subdomain {}", neighbor + 1, subdomain + 1)]
    NotNeighbors { subdomain: usize, neighbor: usize },
    #[error("interface facet {facet} has no adjacent cell")]
    MalformedFacet { facet: usize },
}
