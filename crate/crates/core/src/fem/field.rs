//! Discrete fields: continuous P1 pressures and DG1 interface traces.

use super::space::{InterfaceTrace, SubdomainSpace};
use super::FemError;

/// Nodal values of a P1 function on one subdomain.
#[derive(Debug, Clone, PartialEq)]
pub struct P1Field {
    pub subdomain: usize,
    pub values: Vec<f64>,
}

impl P1Field {
    pub fn zeros(space: &SubdomainSpace) -> Self {
        Self {
            subdomain: space.index(),
            values: vec![0.0; space.num_dofs()],
        }
    }

    pub fn from_values(space: &SubdomainSpace, values: Vec<f64>) -> Result<Self, FemError> {
        if values.len() != space.num_dofs() {
            return Err(FemError::DofMismatch {
                expected: space.num_dofs(),
                found: values.len(),
            });
        }
        Ok(Self {
            subdomain: space.index(),
            values,
        })
    }

    pub fn interpolate(space: &SubdomainSpace, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            subdomain: space.index(),
            values: space.interpolate(f),
        }
    }
}

/// Two endpoint values per facet of the interface `(owner, neighbor)`,
/// ordered like the interface facets.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFieldDG1 {
    pub owner: usize,
    pub neighbor: usize,
    pub values: Vec<[f64; 2]>,
}

impl TraceFieldDG1 {
    pub fn zeros(owner: usize, trace: &InterfaceTrace) -> Self {
        Self {
            owner,
            neighbor: trace.neighbor,
            values: vec![[0.0; 2]; trace.num_facets()],
        }
    }

    pub fn constant(owner: usize, trace: &InterfaceTrace, c: f64) -> Self {
        Self {
            owner,
            neighbor: trace.neighbor,
            values: vec![[c; 2]; trace.num_facets()],
        }
    }
}
